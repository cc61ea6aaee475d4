"""Closed-form linear and convex bounds.

Functions return ``None`` where no closed form is known (the left ranges of
the general Renyi and Hellinger orders); callers fall back to the numeric
engine in :mod:`pinsker.engine`.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

from pinsker.divergences import LN2, DivergenceSpec, Family

LOG2_LN2 = math.log2(LN2)


# ---------------------------------------------------------------------------
# parametrized relative-entropy curve

# Taylor coefficients in l = t ln 2; T in units of 1, D in nats.
_T_SERIES = (1 / 4, -1 / 144, 1 / 4320, -1 / 134400, 1 / 4354560)
_D_SERIES = (1 / 8, -1 / 192, 1 / 5184, -1 / 153600, 1 / 4838400)
_SERIES_CUTOFF = 0.05


@dataclass(frozen=True)
class ParametrizedPoint:
    t: float
    T: float
    D: float


def _curve(t: float) -> tuple[float, float]:
    if t <= 0.0:
        return 0.0, 0.0
    l = t * LN2
    if l < _SERIES_CUTOFF:
        l2 = l * l
        T = l * sum(c * l2**k for k, c in enumerate(_T_SERIES))
        D = l2 * sum(c * l2**k for k, c in enumerate(_D_SERIES)) / LN2
        return T, D
    # written in u = 2^-t so nothing overflows for large t
    u = math.exp(-l)
    one_minus_u = -math.expm1(-l)
    g1 = 1.0 - u * (1.0 + l)        # (2^t - 1 - l) / 2^t
    g2 = l - 1.0 + u                # (1 - 2^t + 2^t l) / 2^t
    den = one_minus_u * one_minus_u
    T = g1 * g2 / (den * l)
    log2_t = math.log2(t)
    log2_1mu = math.log2(one_minus_u)
    x = log2_t - t - log2_1mu       # log2(t / (2^t - 1))
    y = log2_t - log2_1mu           # log2(2^t t / (2^t - 1))
    D = (g2 * u / den) * x + (g1 / den) * y + LOG2_LN2
    return T, D


def umegaki_parametrized(t: float) -> ParametrizedPoint:
    """Point ``(T(t), D(t))`` on the optimal relative-entropy bound.

    ``t`` is also the slope of the bound at that point. ``t = 0`` yields the
    limit point ``(0, 0)``.
    """
    if t < 0:
        raise ValueError(f"curve parameter must be nonnegative, got {t}")
    T, D = _curve(float(t))
    return ParametrizedPoint(float(t), T, D)


def umegaki_slope_parameter(T: float, xtol: float = 1e-13) -> float:
    """Invert ``T(t) = T`` by bisection; returns ``t`` (the bound's slope at T)."""
    if not 0.0 <= T < 1.0:
        raise ValueError(f"trace distance must lie in [0, 1), got {T}")
    if T == 0.0:
        return 0.0
    lo, hi = 0.0, 1.0
    while _curve(hi)[0] < T:
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            return hi
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if hi - lo <= xtol * max(1.0, hi) or mid in (lo, hi):
            break
        if _curve(mid)[0] < T:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def umegaki_convex_bound(T: float) -> float:
    """Optimal convex lower bound of the relative entropy (bits) at distance T."""
    if T == 1.0:
        return math.inf
    return _curve(umegaki_slope_parameter(T))[1]


def umegaki_minimizer(lam: float) -> tuple[float, float]:
    """Closed-form optimal binary pair for the relative-entropy linear bound."""
    if lam == 0.0:
        return 0.5, 0.5
    l = lam * LN2
    em1 = math.expm1(l)
    if l < _SERIES_CUTOFF:
        r = 0.5 + l * (1 / 6 - l**2 * (1 / 180 - l**2 * (1 / 5040 - l**2 / 151200)))
        s = 0.5 - l * (1 / 12 - l**2 * (1 / 720 - l**2 * (1 / 30240 - l**2 / 1209600)))
        return r, s
    a = math.exp(l) if l < 700 else math.inf
    if math.isinf(a):
        return 1.0, 1.0 / l
    r = a * (em1 - l) / (em1 * em1)
    s = -1.0 / em1 + 1.0 / l
    return r, s


# ---------------------------------------------------------------------------
# linear bounds


def _max_linear(lam: float) -> float:
    if lam * LN2 <= 1.0:
        return 0.0
    return 1.0 / LN2 - lam + math.log2(lam * LN2)


def _fidelity_linear(lam: float) -> float:
    q = math.sqrt(1.0 + (lam * LN2) ** 2)
    return (1.0 - q + math.log((1.0 + q) / 2.0)) / LN2


def _collision_linear(lam: float) -> float:
    if lam >= 2.0 / LN2:
        return _max_linear(lam)
    x = lam * LN2
    q = math.sqrt(max(4.0 - x * x, 0.0))
    # -2 + q = -x^2 / (2 + q) avoids cancellation at small lam
    return (-x * x / (2.0 + q) - 2.0 * math.log1p((q - 2.0) / 4.0)) / math.log(4.0)


def _umegaki_linear(lam: float) -> float:
    if lam == 0.0:
        return 0.0
    T, D = _curve(lam)
    return D - lam * T


def _chi2_linear(lam: float) -> float:
    if lam <= 4.0:
        return -lam * lam / 16.0
    return -(math.sqrt(lam) - 1.0) ** 2


def _hellinger_crit(alpha: float) -> float:
    return (alpha / (alpha - 1.0)) ** alpha


def _renyi_crit(alpha: float) -> float:
    return alpha / ((alpha - 1.0) * LN2)


_SWITCH_TOL = 1e-12


@functools.lru_cache(maxsize=64)
def renyi_switch_slope(alpha: float) -> float:
    """Smallest slope from which the Renyi linear bound equals the max one.

    For ``1 < alpha <= 2`` this is ``alpha / ((alpha - 1) ln 2)``, where the
    minimizer ``r = 1`` stops being a local optimum. For ``alpha > 2`` an
    interior minimizer still wins at that slope, and the crossover is found
    by bisection on the gap between the numeric and the max linear bound.
    """
    if alpha <= 1.0:
        raise ValueError(f"switch slope needs alpha > 1, got {alpha}")
    crit = _renyi_crit(alpha)
    if alpha <= 2.0:
        return crit
    from pinsker.divergences import renyi
    from pinsker.engine import linear_bound_numeric

    spec = renyi(alpha)

    def below(lam: float) -> bool:
        return linear_bound_numeric(spec, lam)[0] < _max_linear(lam) - _SWITCH_TOL

    lo, hi = crit, 1.25 * crit
    while below(hi):
        lo, hi = hi, 1.25 * hi
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if below(mid):
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * hi:
            break
    return hi


def renyi_switch_point(alpha: float) -> float:
    """Trace distance from which the Renyi convex bound is ``log2(1/(1-T))``."""
    if 1.0 < alpha <= 2.0:
        return 1.0 / alpha
    return 1.0 - 1.0 / (renyi_switch_slope(alpha) * LN2)


def linear_bound_analytic(spec: DivergenceSpec, lam: float) -> float | None:
    """Closed-form optimal linear bound ``L_D(lam)``, or ``None``."""
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    lam = float(lam)
    spec = spec.canonical()
    fam = spec.family
    if math.isinf(lam):
        return -math.inf
    if fam is Family.MAX:
        return _max_linear(lam)
    if fam is Family.FIDELITY:
        return _fidelity_linear(lam)
    if fam is Family.COLLISION:
        return _collision_linear(lam)
    if fam is Family.UMEGAKI:
        return _umegaki_linear(lam)
    if fam in (Family.NEYMAN_CHI2, Family.PEARSON_CHI2):
        return _chi2_linear(lam)
    if fam is Family.RENYI:
        if spec.alpha < 1.0 or lam < renyi_switch_slope(spec.alpha):
            return None
        return _max_linear(lam)
    if fam is Family.HELLINGER:
        a = spec.alpha
        if a == 1.0:
            # nats version of the relative entropy: L(lam) = ln2 * L_bits(lam / ln2)
            return LN2 * _umegaki_linear(lam / LN2)
        if lam < _hellinger_crit(a):
            return None
        return (1.0 + lam * (a - 1.0 - a * lam ** (-1.0 / a))) / (1.0 - a)
    if fam is Family.SMOOTHED_MAX:
        eps = spec.epsilon
        if lam > 1.0 / (LN2 * eps):
            return None
        return _max_linear(lam) - lam * eps
    return None  # pragma: no cover


# ---------------------------------------------------------------------------
# convex bounds


def _neg_log2_1m(x: float) -> float:
    # log2(1 / (1 - x))
    if x >= 1.0:
        return math.inf
    return -math.log1p(-x) / LN2


def convex_bound_analytic(spec: DivergenceSpec, T: float) -> float | None:
    """Closed-form optimal convex bound ``B_D(T)``, or ``None``.

    Diverging bounds report ``inf`` at ``T = 1``.
    """
    if not 0.0 <= T <= 1.0:
        raise ValueError(f"trace distance must lie in [0, 1], got {T}")
    T = float(T)
    spec = spec.canonical()
    fam = spec.family
    if fam is Family.MAX:
        return _neg_log2_1m(T)
    if fam is Family.FIDELITY:
        return _neg_log2_1m(T * T)
    if fam is Family.COLLISION:
        if T <= 0.5:
            return math.log1p(4.0 * T * T) / LN2
        return _neg_log2_1m(T)
    if fam is Family.UMEGAKI:
        return umegaki_convex_bound(T)
    if fam in (Family.NEYMAN_CHI2, Family.PEARSON_CHI2):
        if T <= 0.5:
            return 4.0 * T * T
        return math.inf if T == 1.0 else T / (1.0 - T)
    if fam is Family.RENYI:
        if spec.alpha < 1.0 or T < renyi_switch_point(spec.alpha):
            return None
        return _neg_log2_1m(T)
    if fam is Family.HELLINGER:
        a = spec.alpha
        if a == 1.0:
            return LN2 * umegaki_convex_bound(T)
        if T < 1.0 / a:
            return None
        if T == 1.0:
            return math.inf
        return (1.0 - (1.0 - T) ** (1.0 - a)) / (1.0 - a)
    if fam is Family.SMOOTHED_MAX:
        eps = spec.epsilon
        return 0.0 if T <= eps else _neg_log2_1m(T - eps)
    return None  # pragma: no cover


def convex_bound_slope(spec: DivergenceSpec, T: float) -> float | None:
    """Closed-form derivative ``dB_D/dT`` where the bound is analytic."""
    if not 0.0 <= T <= 1.0:
        raise ValueError(f"trace distance must lie in [0, 1], got {T}")
    spec = spec.canonical()
    fam = spec.family
    if T == 1.0 and fam is not Family.SMOOTHED_MAX:
        return math.inf
    if fam is Family.MAX:
        return 1.0 / (LN2 * (1.0 - T))
    if fam is Family.FIDELITY:
        return 2.0 * T / (LN2 * (1.0 - T * T))
    if fam is Family.COLLISION:
        if T <= 0.5:
            return 8.0 * T / (LN2 * (1.0 + 4.0 * T * T))
        return 1.0 / (LN2 * (1.0 - T))
    if fam is Family.UMEGAKI:
        return umegaki_slope_parameter(T)
    if fam in (Family.NEYMAN_CHI2, Family.PEARSON_CHI2):
        return 8.0 * T if T <= 0.5 else 1.0 / (1.0 - T) ** 2
    if fam is Family.RENYI:
        if spec.alpha < 1.0 or T < renyi_switch_point(spec.alpha):
            return None
        return 1.0 / (LN2 * (1.0 - T))
    if fam is Family.HELLINGER:
        a = spec.alpha
        if a == 1.0:
            return LN2 * umegaki_slope_parameter(T)
        if T < 1.0 / a:
            return None
        return (1.0 - T) ** (-a)
    if fam is Family.SMOOTHED_MAX:
        eps = spec.epsilon
        if T <= eps:
            return 0.0
        return 1.0 / (LN2 * (1.0 - (T - eps)))
    return None  # pragma: no cover


def has_full_closed_form(spec: DivergenceSpec) -> bool:
    """True when :func:`convex_bound_analytic` is defined on all of [0, 1]."""
    spec = spec.canonical()
    if spec.family is Family.RENYI:
        return False
    if spec.family is Family.HELLINGER:
        return spec.alpha == 1.0
    return True


def validity_range(spec: DivergenceSpec) -> tuple[float, float]:
    """Interval of T on which the closed-form convex bound is available."""
    spec = spec.canonical()
    if spec.family is Family.RENYI:
        if spec.alpha < 1.0:
            return (math.nan, math.nan)
        return (renyi_switch_point(spec.alpha), 1.0)
    if spec.family is Family.HELLINGER and spec.alpha != 1.0:
        return (1.0 / spec.alpha, 1.0)
    return (0.0, 1.0)


# ---------------------------------------------------------------------------
# breakpoints


@dataclass(frozen=True)
class Breakpoints:
    """Slopes and trace distances where a piecewise bound changes formula.

    For the smoothed max divergence ``lambdas`` holds ``(lambda_eps,
    lambda_max)`` and ``ts`` holds ``(epsilon,)``.
    """

    lambdas: tuple[float, ...]
    ts: tuple[float, ...]


def breakpoints(spec: DivergenceSpec) -> Breakpoints:
    spec = spec.canonical()
    fam = spec.family
    if fam in (Family.NEYMAN_CHI2, Family.PEARSON_CHI2):
        return Breakpoints((4.0,), (0.5,))
    if fam is Family.COLLISION:
        return Breakpoints((2.0 / LN2,), (0.5,))
    if fam is Family.RENYI and spec.alpha > 1.0:
        a = spec.alpha
        return Breakpoints((renyi_switch_slope(a),), (renyi_switch_point(a),))
    if fam is Family.HELLINGER and spec.alpha > 1.0:
        return Breakpoints((_hellinger_crit(spec.alpha),), (1.0 / spec.alpha,))
    if fam is Family.SMOOTHED_MAX:
        eps = spec.epsilon
        return Breakpoints((1.0 / (LN2 * (1.0 - eps)), 1.0 / (LN2 * eps)), (eps,))
    return Breakpoints((), ())
