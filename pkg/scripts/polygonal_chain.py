"""Vertices and tangents of the numeric polygonal-chain bound.

Uses a deliberately coarse slope grid by default so the individual tangents
are visible when plotted.
"""

from __future__ import annotations

import argparse
import os
from dataclasses import dataclass

from pinsker import engine
from pinsker.cli import render_table, write_atomic
from pinsker.divergences import parse_spec


@dataclass
class ChainConfig:
    divergence: str = "renyi"
    alpha: float | None = 1.5
    n_lambdas: int = 12
    lambda_min: float = 0.5
    lambda_max: float = 20.0
    out_dir: str = "figures"


def run(cfg: ChainConfig) -> None:
    os.makedirs(cfg.out_dir, exist_ok=True)
    spec = parse_spec(cfg.divergence, cfg.alpha)
    chain = engine.numeric_bound(spec, cfg.n_lambdas, cfg.lambda_min, cfg.lambda_max,
                                 refine_tol=None, direct=True)
    t, b = chain.vertices()
    write_atomic(os.path.join(cfg.out_dir, "chain_vertices.csv"),
                 render_table(["T", "bound"], zip(t, b), "csv"))
    rows = zip(chain.slopes, chain.intercepts)
    write_atomic(os.path.join(cfg.out_dir, "chain_tangents.csv"),
                 render_table(["lambda", "L"], rows, "csv"))


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--divergence", default=ChainConfig.divergence)
    p.add_argument("--alpha", type=float, default=ChainConfig.alpha)
    p.add_argument("--n-lambdas", type=int, default=ChainConfig.n_lambdas)
    p.add_argument("--out-dir", default=ChainConfig.out_dir)
    a = p.parse_args()
    run(ChainConfig(a.divergence, a.alpha, a.n_lambdas, out_dir=a.out_dir))


if __name__ == "__main__":
    main()
