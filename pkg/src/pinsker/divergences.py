"""Divergence families and their binary (two-level classical) versions.

Every divergence here is evaluated on the pair of diagonal qubit states
diag(r, 1-r) and diag(s, 1-s). Logarithms are base 2. Values are plain floats;
``math.inf`` marks a failed support condition and is never an error.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import rel_entr

LN2 = math.log(2.0)


class ParameterDomainError(ValueError):
    """Raised when a divergence parameter is outside its supported range."""


class Family(enum.Enum):
    HELLINGER = "hellinger"
    NEYMAN_CHI2 = "neyman"
    PEARSON_CHI2 = "pearson"
    RENYI = "renyi"
    FIDELITY = "fidelity"
    UMEGAKI = "umegaki"
    COLLISION = "collision"
    MAX = "max"
    SMOOTHED_MAX = "smoothed-max"


_FIXED_ALPHA = {
    Family.FIDELITY: 0.5,
    Family.UMEGAKI: 1.0,
    Family.COLLISION: 2.0,
    Family.MAX: math.inf,
    Family.SMOOTHED_MAX: math.inf,
}

_RENYI_SPECIAL = {
    0.5: Family.FIDELITY,
    1.0: Family.UMEGAKI,
    2.0: Family.COLLISION,
    math.inf: Family.MAX,
}


@dataclass(frozen=True)
class DivergenceSpec:
    """A divergence family together with its parameters.

    ``alpha`` is required for ``RENYI`` and ``HELLINGER`` and is filled in
    automatically for the families with a fixed order. ``epsilon`` is required
    for ``SMOOTHED_MAX`` and forbidden elsewhere.
    """

    family: Family
    alpha: float | None = None
    epsilon: float | None = None

    def __post_init__(self):
        fam = self.family
        if fam in _FIXED_ALPHA:
            fixed = _FIXED_ALPHA[fam]
            if self.alpha is None:
                object.__setattr__(self, "alpha", fixed)
            elif float(self.alpha) != fixed:
                raise ParameterDomainError(
                    f"{fam.value} has fixed order alpha={fixed}, got {self.alpha}")
        elif fam in (Family.RENYI, Family.HELLINGER):
            if self.alpha is None:
                raise ParameterDomainError(f"{fam.value} requires alpha")
            a = float(self.alpha)
            object.__setattr__(self, "alpha", a)
            if math.isnan(a) or a <= 0:
                raise ParameterDomainError(f"alpha must be positive, got {a}")
            if fam is Family.RENYI and a < 0.5:
                raise ParameterDomainError(
                    f"Renyi order must lie in [1/2, inf], got {a}")
            if fam is Family.HELLINGER and (a < 1 or math.isinf(a)):
                raise ParameterDomainError(
                    f"Hellinger order must lie in [1, inf), got {a}")
        else:
            if self.alpha is not None:
                raise ParameterDomainError(f"{fam.value} takes no alpha")

        if fam is Family.SMOOTHED_MAX:
            if self.epsilon is None:
                raise ParameterDomainError("smoothed-max requires epsilon")
            eps = float(self.epsilon)
            if not 0.0 <= eps < 1.0:
                raise ParameterDomainError(f"epsilon must lie in [0, 1), got {eps}")
            object.__setattr__(self, "epsilon", eps)
        elif self.epsilon is not None:
            raise ParameterDomainError(f"{fam.value} takes no epsilon")

    def canonical(self) -> DivergenceSpec:
        """Map Renyi orders with a dedicated closed form onto that family.

        Smoothed max with ``epsilon == 0`` maps onto the max divergence.
        """
        if self.family is Family.RENYI and self.alpha in _RENYI_SPECIAL:
            return DivergenceSpec(_RENYI_SPECIAL[self.alpha])
        if self.family is Family.SMOOTHED_MAX and self.epsilon == 0.0:
            return DivergenceSpec(Family.MAX)
        return self

    @property
    def label(self) -> str:
        fam = self.family
        if fam in (Family.RENYI, Family.HELLINGER):
            return f"{fam.value}(alpha={self.alpha:g})"
        if fam is Family.SMOOTHED_MAX:
            return f"{fam.value}(epsilon={self.epsilon:g})"
        return fam.value


def renyi(alpha: float) -> DivergenceSpec:
    return DivergenceSpec(Family.RENYI, alpha=alpha)


def hellinger(alpha: float) -> DivergenceSpec:
    return DivergenceSpec(Family.HELLINGER, alpha=alpha)


def smoothed_max(epsilon: float) -> DivergenceSpec:
    return DivergenceSpec(Family.SMOOTHED_MAX, epsilon=epsilon)


def parse_spec(name: str, alpha: float | None = None,
               epsilon: float | None = None) -> DivergenceSpec:
    """Build a spec from a CLI-style family name such as ``"smoothed-max"``."""
    aliases = {"kl": "umegaki", "relative-entropy": "umegaki",
               "chi2-neyman": "neyman", "chi2-pearson": "pearson",
               "smoothed_max": "smoothed-max", "smax": "smoothed-max"}
    key = aliases.get(name.lower(), name.lower())
    try:
        fam = Family(key)
    except ValueError:
        valid = ", ".join(f.value for f in Family)
        raise ParameterDomainError(f"unknown divergence {name!r}; choose from {valid}")
    if fam in _FIXED_ALPHA and alpha is not None and float(alpha) == _FIXED_ALPHA[fam]:
        alpha = None
    return DivergenceSpec(fam, alpha=alpha, epsilon=epsilon)


class BinaryPair(NamedTuple):
    r: float
    s: float


# ---------------------------------------------------------------------------
# vectorized evaluation


def _log2_ratio(a, b):
    # log2(a/b) with 0/0 -> 0 and a/0 -> +inf
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.log2(a) - np.log2(b)
    out = np.where((a == 0) & (b == 0), 0.0, out)
    out = np.where((b == 0) & (a > 0), np.inf, out)
    return out


def _log_power_term(p, q, alpha):
    # ln(p^alpha q^(1-alpha)) with 0^alpha = 0 and p > 0 = q giving +inf (alpha > 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = alpha * np.log(p) + (1.0 - alpha) * np.log(q)
    out = np.where(p == 0, -np.inf, out)
    if alpha > 1:
        out = np.where((q == 0) & (p > 0), np.inf, out)
    else:
        out = np.where(q == 0, -np.inf, out)
    return out


def _log_q(r, s, alpha):
    return np.logaddexp(_log_power_term(r, s, alpha),
                        _log_power_term(1.0 - r, 1.0 - s, alpha))


def _chi2(num_p, den):
    d2 = (num_p) ** 2
    den1 = den * (1.0 - den)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = d2 / den1
    return np.where(den1 == 0, np.where(d2 == 0, 0.0, np.inf), out)


def binary_divergence(spec: DivergenceSpec, r, s) -> np.ndarray:
    """Vectorized binary divergence ``D_bin(r || s)`` in bits.

    Broadcasts over ``r`` and ``s``; entries where ``r == s`` are exactly 0.
    """
    spec = spec.canonical()
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    fam = spec.family

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if fam is Family.UMEGAKI:
            out = (rel_entr(r, s) + rel_entr(1.0 - r, 1.0 - s)) / LN2
        elif fam is Family.RENYI:
            out = _log_q(r, s, spec.alpha) / LN2 / (spec.alpha - 1.0)
        elif fam is Family.HELLINGER:
            if spec.alpha == 1.0:
                out = rel_entr(r, s) + rel_entr(1.0 - r, 1.0 - s)
            else:
                out = np.expm1(_log_q(r, s, spec.alpha)) / (spec.alpha - 1.0)
        elif fam is Family.FIDELITY:
            bc = np.sqrt(r * s) + np.sqrt((1.0 - r) * (1.0 - s))
            out = -2.0 * np.log2(bc)
        elif fam is Family.COLLISION:
            out = _log_q(r, s, 2.0) / LN2
        elif fam is Family.NEYMAN_CHI2:
            out = _chi2(r - s, s)
        elif fam is Family.PEARSON_CHI2:
            out = _chi2(r - s, r)
        elif fam is Family.MAX:
            out = np.where(s < r, _log2_ratio(r, s), _log2_ratio(1.0 - r, 1.0 - s))
        elif fam is Family.SMOOTHED_MAX:
            eps = spec.epsilon
            up = _log2_ratio(np.maximum(r - eps, 0.0), s)
            down = _log2_ratio(np.maximum(1.0 - r - eps, 0.0), 1.0 - s)
            out = np.where(s < r - eps, up, np.where(r + eps <= s, down, 0.0))
        else:  # pragma: no cover - enum is exhaustive
            raise ParameterDomainError(f"unsupported family {fam}")

    out = np.where(r == s, 0.0, out)
    # divergences are nonnegative; clip rounding noise around zero
    return np.maximum(out, 0.0)


def eval_binary(spec: DivergenceSpec, p: BinaryPair | tuple[float, float]) -> float:
    """Binary divergence of a single pair, ``+inf`` on support failure."""
    r, s = p
    if not (0.0 <= r <= 1.0 and 0.0 <= s <= 1.0):
        raise ValueError(f"(r, s) must lie in the unit square, got ({r}, {s})")
    return float(binary_divergence(spec, r, s))


def objective_xi(spec: DivergenceSpec, lam: float,
                 p: BinaryPair | tuple[float, float]) -> float:
    """``D_bin(r || s) - lam * |r - s|``; infinities propagate."""
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    r, s = p
    d = eval_binary(spec, p)
    if math.isinf(d):
        return d
    return d - lam * abs(r - s)


# ---------------------------------------------------------------------------
# catalog


@dataclass(frozen=True)
class CatalogEntry:
    family: Family
    parameters: tuple[str, ...]
    alpha_range: str
    linear_analytic: str
    convex_analytic: str


def catalog_list() -> list[CatalogEntry]:
    """All supported families with parameters and closed-form availability."""
    return [
        CatalogEntry(Family.HELLINGER, ("alpha",), "[1, inf)",
                     "lambda >= (alpha/(alpha-1))^alpha",
                     "analytic only for T >= 1/alpha"),
        CatalogEntry(Family.NEYMAN_CHI2, (), "-", "full range", "full range"),
        CatalogEntry(Family.PEARSON_CHI2, (), "-", "full range", "full range"),
        CatalogEntry(Family.RENYI, ("alpha",), "[1/2, inf]",
                     "lambda >= alpha/((alpha-1) ln 2) for 1 < alpha <= 2; "
                     "numeric switch slope for alpha > 2",
                     "T >= 1/alpha for 1 < alpha <= 2; T >= switch point for alpha > 2"),
        CatalogEntry(Family.FIDELITY, (), "1/2", "full range", "full range"),
        CatalogEntry(Family.UMEGAKI, (), "1", "full range",
                     "full range (parametrized curve)"),
        CatalogEntry(Family.COLLISION, (), "2", "full range", "full range"),
        CatalogEntry(Family.MAX, (), "inf", "full range", "full range"),
        CatalogEntry(Family.SMOOTHED_MAX, ("epsilon",), "inf",
                     "lambda <= 1/(epsilon ln 2)", "full range"),
    ]


# ---------------------------------------------------------------------------
# scalar fast path used inside the simplex loop


def _s_log2_ratio(a: float, b: float) -> float:
    if b == 0.0:
        return 0.0 if a == 0.0 else math.inf
    if a == 0.0:
        return -math.inf
    return math.log2(a / b)


def _s_kl(p: float, q: float) -> float:
    # p ln(p/q) in nats
    if p == 0.0:
        return 0.0
    if q == 0.0:
        return math.inf
    return p * math.log(p / q)


def _s_log_pow(p: float, q: float, alpha: float) -> float:
    if p == 0.0:
        return -math.inf
    if q == 0.0:
        return math.inf if alpha > 1 else -math.inf
    return alpha * math.log(p) + (1.0 - alpha) * math.log(q)


def _s_log_q(r: float, s: float, alpha: float) -> float:
    a = _s_log_pow(r, s, alpha)
    b = _s_log_pow(1.0 - r, 1.0 - s, alpha)
    if a == b == -math.inf:
        return -math.inf
    if math.inf in (a, b):
        return math.inf
    m = max(a, b)
    return m + math.log1p(math.exp(min(a, b) - m))


def scalar_divergence(spec: DivergenceSpec):
    """Return ``f(r, s) -> float`` computing ``D_bin`` with the math module.

    Same conventions as :func:`binary_divergence`, without numpy overhead.
    """
    spec = spec.canonical()
    fam = spec.family
    alpha = spec.alpha
    inf = math.inf

    if fam is Family.UMEGAKI:
        def raw(r, s):
            return (_s_kl(r, s) + _s_kl(1.0 - r, 1.0 - s)) / LN2
    elif fam is Family.RENYI:
        def raw(r, s):
            lq = _s_log_q(r, s, alpha)
            if lq == -inf:
                return inf
            return lq / LN2 / (alpha - 1.0)
    elif fam is Family.HELLINGER:
        if alpha == 1.0:
            def raw(r, s):
                return _s_kl(r, s) + _s_kl(1.0 - r, 1.0 - s)
        else:
            def raw(r, s):
                lq = _s_log_q(r, s, alpha)
                return inf if lq == inf else math.expm1(lq) / (alpha - 1.0)
    elif fam is Family.FIDELITY:
        def raw(r, s):
            bc = math.sqrt(r * s) + math.sqrt((1.0 - r) * (1.0 - s))
            return inf if bc == 0.0 else -2.0 * math.log2(bc)
    elif fam is Family.COLLISION:
        def raw(r, s):
            lq = _s_log_q(r, s, 2.0)
            return lq / LN2
    elif fam in (Family.NEYMAN_CHI2, Family.PEARSON_CHI2):
        pearson = fam is Family.PEARSON_CHI2

        def raw(r, s):
            w = r if pearson else s
            den = w * (1.0 - w)
            d2 = (r - s) ** 2
            if den == 0.0:
                return 0.0 if d2 == 0.0 else inf
            return d2 / den
    elif fam is Family.MAX:
        def raw(r, s):
            if s < r:
                return _s_log2_ratio(r, s)
            return _s_log2_ratio(1.0 - r, 1.0 - s)
    else:
        eps = spec.epsilon

        def raw(r, s):
            if s < r - eps:
                return _s_log2_ratio(r - eps, s)
            if r + eps <= s:
                return _s_log2_ratio(max(1.0 - r - eps, 0.0), 1.0 - s)
            return 0.0

    def f(r: float, s: float) -> float:
        if r == s:
            return 0.0
        v = raw(r, s)
        return v if v > 0.0 else 0.0

    return f
