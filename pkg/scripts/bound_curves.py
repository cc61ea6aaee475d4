"""Convex bounds for a selection of Renyi and Hellinger orders, and the
smoothed against the plain max divergence.

Closed forms are used where they exist and the numeric chain elsewhere; the
``method`` column says which one produced each value.
"""

from __future__ import annotations

import argparse
import math
import os
from dataclasses import dataclass

import numpy as np

from pinsker import analytic, engine
from pinsker.cli import render_table, write_atomic
from pinsker.divergences import DivergenceSpec, Family, hellinger, renyi, smoothed_max


@dataclass
class CurveConfig:
    renyi_orders: tuple[float, ...] = (0.5, 1.0, 4 / 3, 2.0, math.inf)
    hellinger_orders: tuple[float, ...] = (1.0, 10 / 9, 1.5, 2.0)
    epsilon: float = 0.2
    grid: int = 199
    t_max: float = 0.99
    out_dir: str = "figures"


def curve_rows(spec: DivergenceSpec, ts: np.ndarray, order) -> list[list]:
    rows = []
    for t in ts:
        value, method = engine.convex_bound(spec, float(t))
        rows.append([order, t, value, method])
    return rows


def run(cfg: CurveConfig) -> None:
    os.makedirs(cfg.out_dir, exist_ok=True)
    ts = np.linspace(0.0, cfg.t_max, cfg.grid)
    for name, make, orders in (("renyi", renyi, cfg.renyi_orders),
                               ("hellinger", hellinger, cfg.hellinger_orders)):
        rows, meets = [], []
        for a in orders:
            spec = make(a)
            rows += curve_rows(spec, ts, a)
            for t0 in analytic.breakpoints(spec).ts:
                meets.append([a, t0, analytic.convex_bound_analytic(spec, t0)])
        write_atomic(os.path.join(cfg.out_dir, f"{name}_bounds.csv"),
                     render_table(["alpha", "T", "bound", "method"], rows, "csv"))
        write_atomic(os.path.join(cfg.out_dir, f"{name}_meet_points.csv"),
                     render_table(["alpha", "T", "bound"], meets, "csv"))
    ts = np.linspace(0.0, 1.0, cfg.grid)
    plain, smooth = DivergenceSpec(Family.MAX), smoothed_max(cfg.epsilon)
    rows = [[t, analytic.convex_bound_analytic(plain, t),
             analytic.convex_bound_analytic(smooth, t)] for t in ts]
    write_atomic(os.path.join(cfg.out_dir, "smoothed_max_bounds.csv"),
                 render_table(["T", "max", "smoothed_max"], rows, "csv"))


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--grid", type=int, default=CurveConfig.grid)
    p.add_argument("--epsilon", type=float, default=CurveConfig.epsilon)
    p.add_argument("--out-dir", default=CurveConfig.out_dir)
    a = p.parse_args()
    run(CurveConfig(grid=a.grid, epsilon=a.epsilon, out_dir=a.out_dir))


if __name__ == "__main__":
    main()
