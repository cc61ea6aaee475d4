"""Two-dimensional Nelder-Mead simplex descent.

Small and allocation-free on purpose: the linear-bound solver calls it
thousands of times per curve, and the objective is a cheap scalar function.
Infinite objective values are ordered above every finite value.
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

ALPHA, GAMMA, RHO, SIGMA = 1.0, 2.0, 0.5, 0.5


class SimplexResult(NamedTuple):
    x: tuple[float, float]
    fun: float
    nit: int
    converged: bool


def nelder_mead(f: Callable[[float, float], float], x0: tuple[float, float],
                step: float = 0.05, xtol: float = 1e-10, maxiter: int = 500
                ) -> SimplexResult:
    """Minimize ``f(x, y)`` from ``x0``.

    Stops when the simplex diameter drops below ``xtol`` or after ``maxiter``
    iterations.
    """
    x, y = float(x0[0]), float(x0[1])
    pts = [(x, y), (x + step, y), (x, y + step)]
    vals = [f(*p) for p in pts]
    nit = 0
    converged = False
    while nit < maxiter:
        order = sorted(range(3), key=vals.__getitem__)
        pts = [pts[i] for i in order]
        vals = [vals[i] for i in order]
        (bx, by), (mx, my), (wx, wy) = pts
        diam = max(math.hypot(bx - mx, by - my), math.hypot(bx - wx, by - wy),
                   math.hypot(mx - wx, my - wy))
        if diam < xtol:
            converged = True
            break
        nit += 1
        cx, cy = 0.5 * (bx + mx), 0.5 * (by + my)
        rx, ry = cx + ALPHA * (cx - wx), cy + ALPHA * (cy - wy)
        fr = f(rx, ry)
        if fr < vals[0]:
            ex, ey = cx + GAMMA * (rx - cx), cy + GAMMA * (ry - cy)
            fe = f(ex, ey)
            if fe < fr:
                pts[2], vals[2] = (ex, ey), fe
            else:
                pts[2], vals[2] = (rx, ry), fr
            continue
        if fr < vals[1]:
            pts[2], vals[2] = (rx, ry), fr
            continue
        if fr < vals[2]:
            # outside contraction
            kx, ky = cx + RHO * (rx - cx), cy + RHO * (ry - cy)
            fk = f(kx, ky)
            if fk <= fr:
                pts[2], vals[2] = (kx, ky), fk
                continue
        else:
            kx, ky = cx + RHO * (wx - cx), cy + RHO * (wy - cy)
            fk = f(kx, ky)
            if fk < vals[2]:
                pts[2], vals[2] = (kx, ky), fk
                continue
        # shrink toward the best vertex
        for i in (1, 2):
            px, py = pts[i]
            nx, ny = bx + SIGMA * (px - bx), by + SIGMA * (py - by)
            pts[i] = (nx, ny)
            vals[i] = f(nx, ny)
    i = min(range(3), key=vals.__getitem__)
    return SimplexResult(pts[i], vals[i], nit, converged)
