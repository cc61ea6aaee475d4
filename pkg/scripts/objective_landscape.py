"""The linear-bound objective D(r||s) - lam |r - s| on the unit square.

One CSV per slope, in long format ``r,s,xi``; also the numeric minimizer in
the triangle s <= r for each slope.
"""

from __future__ import annotations

import argparse
import os
from dataclasses import dataclass

import numpy as np

from pinsker import engine
from pinsker.cli import render_table, write_atomic
from pinsker.divergences import binary_divergence, renyi


@dataclass
class LandscapeConfig:
    alpha: float = 2.0
    lambdas: tuple[float, ...] = (1.0, 2.0, 3.0)
    grid: int = 101
    out_dir: str = "figures"


def run(cfg: LandscapeConfig) -> None:
    os.makedirs(cfg.out_dir, exist_ok=True)
    spec = renyi(cfg.alpha)
    g = np.linspace(0.0, 1.0, cfg.grid)
    r, s = (x.ravel() for x in np.meshgrid(g, g, indexing="ij"))
    d = binary_divergence(spec, r, s)
    minima = []
    for lam in cfg.lambdas:
        xi = d - lam * np.abs(r - s)
        write_atomic(os.path.join(cfg.out_dir, f"objective_lambda_{lam:g}.csv"),
                     render_table(["r", "s", "xi"], zip(r, s, xi), "csv"))
        value, pair = engine.linear_bound_numeric(spec, lam)
        minima.append([lam, pair[0], pair[1], value])
    write_atomic(os.path.join(cfg.out_dir, "objective_minima.csv"),
                 render_table(["lambda", "r", "s", "L"], minima, "csv"))


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--alpha", type=float, default=LandscapeConfig.alpha)
    p.add_argument("--lambdas", type=float, nargs="+", default=list(LandscapeConfig.lambdas))
    p.add_argument("--grid", type=int, default=LandscapeConfig.grid)
    p.add_argument("--out-dir", default=LandscapeConfig.out_dir)
    a = p.parse_args()
    run(LandscapeConfig(a.alpha, tuple(a.lambdas), a.grid, a.out_dir))


if __name__ == "__main__":
    main()
