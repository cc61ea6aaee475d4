"""Numeric optimal linear and convex bounds.

The linear bound ``L_D(lam)`` is the minimum of ``D_bin(r||s) - lam (r - s)``
over the triangle ``0 <= s <= r <= 1``; the convex bound is its Legendre-type
transform, represented as the upper envelope of the tangents.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from pinsker import analytic
from pinsker.divergences import (
    BinaryPair,
    DivergenceSpec,
    Family,
    binary_divergence,
    scalar_divergence,
)
from pinsker.simplex import nelder_mead

DELTA = 1e-12
SEED_GRID = 21
N_STARTS = 3
FD_STEP = 1e-6
DEFAULT_GRID = (400, 1e-3, 1e4)
DEFAULT_REFINE_TOL = 5e-5


class OutOfDomainError(ValueError):
    """Raised when a slope lies outside the range where a bound is defined."""


def default_lambda_grid(n: int = 400, lo: float = 1e-3, hi: float = 1e4) -> np.ndarray:
    """``0`` followed by ``n`` geometrically spaced slopes in ``[lo, hi]``."""
    return np.concatenate([[0.0], np.geomspace(lo, hi, n)])


# ---------------------------------------------------------------------------
# inner minimization


def _clamp(x: float) -> float:
    return DELTA if x < DELTA else (1.0 - DELTA if x > 1.0 - DELTA else x)


@functools.lru_cache(maxsize=64)
def _seed_grid(spec: DivergenceSpec):
    g = np.linspace(0.0, 1.0, SEED_GRID)
    R, S = np.meshgrid(g, g, indexing="ij")
    mask = S <= R
    r = np.clip(R[mask], DELTA, 1.0 - DELTA)
    s = np.clip(S[mask], DELTA, 1.0 - DELTA)
    d = binary_divergence(spec, r, s)
    ok = np.isfinite(d)
    return r[ok], s[ok], d[ok]


def _pick_starts(spec: DivergenceSpec, lam: float) -> list[tuple[float, float]]:
    r, s, d = _seed_grid(spec)
    vals = d - lam * (r - s)
    starts: list[tuple[float, float]] = []
    order = np.argsort(vals, kind="stable")
    for i in order:
        p = (float(r[i]), float(s[i]))
        if all(max(abs(p[0] - q[0]), abs(p[1] - q[1])) >= 0.2 for q in starts):
            starts.append(p)
            if len(starts) == N_STARTS:
                break
    # minimizers often sit on the edges r = 1 or s = 0, where flat stretches
    # of the objective can hide them from the ranking above
    for on_edge in (r >= 1.0 - DELTA, s <= DELTA):
        i = order[on_edge[order]][0]
        p = (float(r[i]), float(s[i]))
        if p not in starts:
            starts.append(p)
    return starts


_U_MAX = math.log((1.0 - DELTA) / DELTA)


def _logit(p: float) -> float:
    p = _clamp(p)
    return math.log(p / (1.0 - p))


def _expit(u: float) -> float:
    u = -_U_MAX if u < -_U_MAX else (_U_MAX if u > _U_MAX else u)
    return 1.0 / (1.0 + math.exp(-u))


def _snap(p: float) -> float:
    if p <= 1e-9:
        return 0.0
    if p >= 1.0 - 1e-9:
        return 1.0
    return p


def _to_triangle(r: float, s: float) -> tuple[float, float]:
    # (r, s) -> (1-r, 1-s) is a symmetry of every binary divergence
    r, s = _clamp(r), _clamp(s)
    if s > r:
        r, s = 1.0 - r, 1.0 - s
    return r, s


def linear_bound_numeric(spec: DivergenceSpec, lam: float,
                         warm: Sequence[tuple[float, float]] = ()
                         ) -> tuple[float, BinaryPair]:
    """Minimize ``D_bin(r||s) - lam |r - s|`` by multi-start simplex descent.

    The simplex runs in logit coordinates, which resolves minimizers lying
    exponentially close to the edges of the square. Returns the minimum and
    the minimizing pair with ``s <= r``.
    """
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    lam = float(lam)
    fbin = scalar_divergence(spec)

    def xi(r: float, s: float) -> float:
        return fbin(r, s) - lam * abs(r - s)

    def xi_u(u: float, v: float) -> float:
        return xi(_expit(u), _expit(v))

    best_val, best = 0.0, (0.5, 0.5)
    starts = list(_pick_starts(spec, lam))
    starts.extend((float(a), float(b)) for a, b in warm)
    for r0, s0 in starts:
        x0 = (_logit(r0), _logit(s0))
        if not math.isfinite(xi_u(*x0)):
            continue
        res = nelder_mead(xi_u, x0, step=0.5)
        # restart once from the optimum with a small simplex
        res = nelder_mead(xi_u, res.x, step=0.01)
        if res.fun < best_val:
            best_val, best = res.fun, (_expit(res.x[0]), _expit(res.x[1]))
    r, s = _to_triangle(*best)
    value = xi(r, s)
    # the square is closed: try snapping coordinates that sit on the clamp
    for rr, ss in ((_snap(r), s), (r, _snap(s)), (_snap(r), _snap(s))):
        if (rr, ss) != (r, s):
            v = xi(rr, ss)
            if v < value:
                r, s, value = rr, ss, v
    if not value < 0.0:
        # the diagonal r = s always attains zero
        return 0.0, BinaryPair(0.5, 0.5)
    return value, BinaryPair(r, s)


@dataclass(frozen=True, eq=False)
class LinearBound:
    """Optimal linear bound sampled on a slope grid."""

    spec: DivergenceSpec
    lambdas: np.ndarray
    values: np.ndarray
    minimizers: np.ndarray  # shape (n, 2): columns r*, s*
    source: str = "numeric"

    def __len__(self) -> int:
        return len(self.lambdas)

    @property
    def touch_points(self) -> tuple[np.ndarray, np.ndarray]:
        """Trace distance and divergence where each tangent meets the set."""
        t = self.minimizers[:, 0] - self.minimizers[:, 1]
        return t, self.values + self.lambdas * t

    def tangents(self) -> list[Tangent]:
        return [Tangent(float(m), float(b)) for m, b in zip(self.lambdas, self.values)]


def build_linear_bound(spec: DivergenceSpec, lambdas, warm_start: bool = True
                       ) -> LinearBound:
    """Numeric linear bound on a strictly increasing slope grid."""
    lambdas = np.asarray(lambdas, dtype=float)
    if lambdas.ndim != 1 or len(lambdas) == 0:
        raise ValueError("lambda grid must be a non-empty 1-d sequence")
    if np.any(lambdas < 0) or np.any(np.diff(lambdas) <= 0):
        raise ValueError("lambda grid must be nonnegative and strictly increasing")
    values = np.empty_like(lambdas)
    mins = np.empty((len(lambdas), 2))
    prev: list[tuple[float, float]] = []
    for i, lam in enumerate(lambdas):
        v, p = linear_bound_numeric(spec, lam, warm=prev if warm_start else ())
        values[i] = v
        mins[i] = p
        prev = [tuple(p)]
    return LinearBound(spec, lambdas, values, mins, "numeric")


def _gap_certificate(lb: LinearBound) -> np.ndarray:
    """Upper bound on (true bound - chain) between consecutive tangents.

    The true convex bound lies above both tangents and below the chord through
    their touch points.
    """
    t, b = lb.touch_points
    lam, val = lb.lambdas, lb.values
    gaps = np.zeros(len(lam) - 1)
    for i in range(len(lam) - 1):
        t0, t1 = t[i], t[i + 1]
        if t1 - t0 <= 0:
            continue
        dl = lam[i + 1] - lam[i]
        x = (val[i] - val[i + 1]) / dl
        x = min(max(x, t0), t1)
        chord = b[i] + (b[i + 1] - b[i]) * (x - t0) / (t1 - t0)
        chain = max(val[i] + lam[i] * x, val[i + 1] + lam[i + 1] * x)
        gaps[i] = chord - chain
    return gaps


def refine_linear_bound(lb: LinearBound, tol: float = DEFAULT_REFINE_TOL,
                        max_points: int = 20000) -> LinearBound:
    """Insert slopes until every chain gap certificate is at most ``tol``."""
    spec = lb.spec
    lam = list(lb.lambdas)
    val = list(lb.values)
    mins = [tuple(m) for m in lb.minimizers]
    while len(lam) < max_points:
        cur = LinearBound(spec, np.array(lam), np.array(val), np.array(mins))
        bad = np.nonzero(_gap_certificate(cur) > tol)[0]
        if len(bad) == 0:
            break
        new = []
        for i in bad:
            a, b = lam[i], lam[i + 1]
            mid = math.sqrt(a * b) if a > 0 else 0.5 * b
            v, p = linear_bound_numeric(spec, mid, warm=[mins[i], mins[i + 1]])
            new.append((mid, v, tuple(p)))
        merged = sorted(zip(lam, val, mins), key=lambda z: z[0])
        merged = sorted(merged + new, key=lambda z: z[0])
        lam = [z[0] for z in merged]
        val = [z[1] for z in merged]
        mins = [z[2] for z in merged]
    return LinearBound(spec, np.array(lam), np.array(val), np.array(mins), lb.source)


def analytic_linear_bound(spec: DivergenceSpec, lambdas) -> LinearBound:
    """Linear bound from closed forms; raises if any slope lacks one."""
    lambdas = np.asarray(lambdas, dtype=float)
    vals = []
    for lam in lambdas:
        v = analytic.linear_bound_analytic(spec, lam)
        if v is None:
            raise OutOfDomainError(f"no closed form for {spec.label} at lambda={lam}")
        vals.append(v)
    mins = np.full((len(lambdas), 2), np.nan)
    return LinearBound(spec, lambdas, np.array(vals), mins, "analytic")


def legendre_transform(lb: LinearBound, t: float) -> float:
    """``max_i L(lam_i) + lam_i t``: a lower bound on ``B_D(t)`` for any grid."""
    if len(lb) == 0:
        raise ValueError("empty linear bound")
    return float(np.max(lb.values + lb.lambdas * t))


# ---------------------------------------------------------------------------
# convex bounds


@dataclass(frozen=True)
class Tangent:
    slope: float
    intercept: float

    def __call__(self, t):
        return self.intercept + self.slope * t


class ConvexBound:
    """A convex, nondecreasing function ``T -> B(T)`` on ``[0, 1]``."""

    spec: DivergenceSpec

    def __call__(self, t):
        raise NotImplementedError

    def slope(self, t: float) -> float:
        """Centered finite-difference slope (one-sided at the ends)."""
        h = FD_STEP
        lo, hi = max(t - h, 0.0), min(t + h, 1.0)
        return float((self(hi) - self(lo)) / (hi - lo))


class ClosedFormBound(ConvexBound):
    def __init__(self, spec: DivergenceSpec):
        if not analytic.has_full_closed_form(spec):
            raise OutOfDomainError(f"{spec.label} has no closed form on all of [0, 1]")
        self.spec = spec

    def __call__(self, t):
        if np.ndim(t):
            return np.array([analytic.convex_bound_analytic(self.spec, float(x))
                             for x in np.ravel(t)]).reshape(np.shape(t))
        return analytic.convex_bound_analytic(self.spec, float(t))

    def slope(self, t: float) -> float:
        return analytic.convex_bound_slope(self.spec, t)

    def __repr__(self):
        return f"ClosedFormBound({self.spec.label})"


class ChainBound(ConvexBound):
    """Upper envelope of tangents, restricted to ``[0, 1]``.

    Every tangent is a valid lower bound, so the chain is one too. Its value
    at ``T = 1`` is finite and only a strict lower bound for diverging bounds.
    """

    def __init__(self, spec: DivergenceSpec, slopes, intercepts,
                 source: LinearBound | None = None):
        self.spec = spec
        self.slopes = np.asarray(slopes, dtype=float)
        self.intercepts = np.asarray(intercepts, dtype=float)
        self.source = source
        # breaks[k] is where line k+1 takes over from line k
        dm = np.diff(self.slopes)
        self.breaks = (self.intercepts[:-1] - self.intercepts[1:]) / dm if len(dm) else np.array([])

    def __len__(self) -> int:
        return len(self.slopes)

    @property
    def tangents(self) -> list[Tangent]:
        return [Tangent(float(m), float(b)) for m, b in zip(self.slopes, self.intercepts)]

    def _line_index(self, t):
        return np.searchsorted(self.breaks, t, side="left")

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        k = self._line_index(t_arr)
        out = self.intercepts[k] + self.slopes[k] * t_arr
        return float(out) if out.ndim == 0 else out

    def active_slope(self, t: float) -> float:
        return float(self.slopes[self._line_index(t)])

    def vertices(self) -> tuple[np.ndarray, np.ndarray]:
        ts = np.concatenate([[0.0], self.breaks, [1.0]])
        return ts, self(ts)

    def __repr__(self):
        return f"ChainBound({self.spec.label}, {len(self)} tangents)"


def build_chain(lb: LinearBound) -> ChainBound:
    """Prune tangents that never attain the envelope on ``[0, 1]``."""
    if len(lb) == 0:
        raise ValueError("empty linear bound")
    order = np.lexsort((lb.values, lb.lambdas))
    lines: list[tuple[float, float]] = []
    for i in order:
        m, b = float(lb.lambdas[i]), float(lb.values[i])
        if not math.isfinite(b):
            continue
        if lines and lines[-1][0] == m:
            lines.pop()  # same slope, lexsort puts the larger intercept last
        while len(lines) >= 2:
            (m1, b1), (m2, b2) = lines[-2], lines[-1]
            x12 = (b1 - b2) / (m2 - m1)
            x13 = (b1 - b) / (m - m1)
            if x13 <= x12:
                lines.pop()
            else:
                break
        lines.append((m, b))
    # clip the envelope to [0, 1]
    while len(lines) >= 2:
        (m1, b1), (m2, b2) = lines[0], lines[1]
        if (b1 - b2) / (m2 - m1) <= 0.0:
            lines.pop(0)
        else:
            break
    while len(lines) >= 2:
        (m1, b1), (m2, b2) = lines[-2], lines[-1]
        if (b1 - b2) / (m2 - m1) >= 1.0:
            lines.pop()
        else:
            break
    slopes, intercepts = zip(*lines)
    return ChainBound(lb.spec, slopes, intercepts, source=lb)


class ShiftedBound(ConvexBound):
    """``0`` on ``[0, eps]`` and ``base(T - eps)`` beyond."""

    def __init__(self, base: ConvexBound, epsilon: float, spec: DivergenceSpec | None = None):
        if not 0.0 < epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
        self.base = base
        self.epsilon = float(epsilon)
        self.spec = spec if spec is not None else base.spec

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        shifted = np.maximum(t_arr - self.epsilon, 0.0)
        vals = np.asarray(self.base(shifted), dtype=float)
        out = np.where(t_arr <= self.epsilon, 0.0, vals)
        return float(out) if out.ndim == 0 else out

    def __repr__(self):
        return f"ShiftedBound({self.base!r}, epsilon={self.epsilon:g})"


def smooth_convex(cb: ConvexBound | Callable[[float], float], epsilon: float,
                  t: float) -> float:
    """Convex bound of the smoothed divergence: 0 up to ``epsilon``, then shifted."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    if t <= epsilon:
        return 0.0
    return float(cb(t - epsilon))


def _slope_at(spec: DivergenceSpec, t: float, chain: ConvexBound | None) -> float:
    s = analytic.convex_bound_slope(spec, t)
    if s is not None:
        return s
    if chain is None:
        chain = numeric_bound(spec)
    return chain.slope(t)


def smoothing_slopes(spec: DivergenceSpec, epsilon: float,
                     chain: ConvexBound | None = None) -> tuple[float, float]:
    """``(lambda_eps, lambda_max)``: slopes of ``B_D`` at ``epsilon`` and ``1 - epsilon``."""
    return _slope_at(spec, epsilon, chain), _slope_at(spec, 1.0 - epsilon, chain)


def smooth_linear(spec: DivergenceSpec, epsilon: float, lam: float,
                  lb: LinearBound | None = None) -> float:
    """Piecewise linear bound of the smoothed divergence.

    Returns 0 for ``lam <= lambda_eps`` and ``L_D(lam) - lam * epsilon`` up to
    ``lambda_max``. The zero branch is not a valid tangent at ``T = epsilon``
    for ``lam > 0``; use :func:`linear_bound_analytic` on a smoothed spec or
    the numeric engine when a certified bound is required.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    chain = build_chain(lb) if lb is not None else None
    lam_eps, lam_max = smoothing_slopes(spec, epsilon, chain)
    if lam > lam_max:
        raise OutOfDomainError(
            f"lambda={lam} exceeds lambda_max={lam_max} for epsilon={epsilon}")
    if lam <= lam_eps:
        return 0.0
    base = analytic.linear_bound_analytic(spec, lam)
    if base is None:
        base = linear_bound_numeric(spec, lam)[0]
    return base - lam * epsilon


# ---------------------------------------------------------------------------
# cached numeric bounds


@functools.lru_cache(maxsize=64)
def numeric_linear_bound(spec: DivergenceSpec, n: int = DEFAULT_GRID[0],
                         lo: float = DEFAULT_GRID[1], hi: float = DEFAULT_GRID[2],
                         refine_tol: float | None = DEFAULT_REFINE_TOL) -> LinearBound:
    """Default-grid numeric linear bound, refined to ``refine_tol`` when given."""
    lb = build_linear_bound(spec, default_lambda_grid(n, lo, hi))
    if refine_tol is not None:
        lb = refine_linear_bound(lb, refine_tol)
    return lb


@functools.lru_cache(maxsize=64)
def numeric_bound(spec: DivergenceSpec, n: int = DEFAULT_GRID[0],
                  lo: float = DEFAULT_GRID[1], hi: float = DEFAULT_GRID[2],
                  refine_tol: float | None = DEFAULT_REFINE_TOL,
                  direct: bool = False) -> ConvexBound:
    """Numeric convex bound for ``spec``.

    Smoothed max goes through the smoothing shift of the max-divergence chain
    unless ``direct`` is set, in which case its own binary version is optimized.
    """
    spec = spec.canonical()
    if spec.family is Family.SMOOTHED_MAX and not direct:
        base = numeric_bound(DivergenceSpec(Family.MAX), n, lo, hi, refine_tol)
        return ShiftedBound(base, spec.epsilon, spec)
    return build_chain(numeric_linear_bound(spec, n, lo, hi, refine_tol))


def convex_bound_numeric(spec: DivergenceSpec, t: float,
                         chain: ChainBound | None = None) -> float:
    """Pointwise-refined numeric ``B_D(t)``.

    Maximizes ``L_D(lam) + lam t`` over ``lam`` between the neighbours of the
    chain's active tangent, with ``L_D`` recomputed by the inner solver.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    spec = spec.canonical()
    if spec.family is Family.SMOOTHED_MAX:
        if t <= spec.epsilon:
            return 0.0
        return convex_bound_numeric(DivergenceSpec(Family.MAX), t - spec.epsilon)
    if chain is None:
        chain = numeric_bound(spec)
    lb = chain.source
    k = int(chain._line_index(t))
    lo = float(chain.slopes[max(k - 1, 0)])
    hi = float(chain.slopes[min(k + 1, len(chain) - 1)])
    if hi <= lo:
        return float(chain(t))
    warm = []
    if lb is not None:
        j = int(np.searchsorted(lb.lambdas, chain.slopes[k]))
        j = min(j, len(lb) - 1)
        warm = [tuple(lb.minimizers[j])]

    def neg(lam):
        return -(linear_bound_numeric(spec, lam, warm=warm)[0] + lam * t)

    res = minimize_scalar(neg, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-10 * max(1.0, hi)})
    return max(-float(res.fun), float(chain(t)))


def convex_bound(spec: DivergenceSpec, t: float, method: str = "auto"
                 ) -> tuple[float, str]:
    """Evaluate ``B_D(t)``; returns ``(value, method_used)``.

    ``auto`` uses the closed form where it exists and the numeric chain
    otherwise.
    """
    if method not in ("auto", "analytic", "numeric"):
        raise ValueError(f"unknown method {method!r}")
    if method in ("auto", "analytic"):
        v = analytic.convex_bound_analytic(spec, t)
        if v is not None:
            return v, "analytic"
        if method == "analytic":
            raise OutOfDomainError(f"no closed form for {spec.label} at T={t}")
    return float(numeric_bound(spec)(t)), "numeric"
