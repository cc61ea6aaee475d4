"""Property suites that tie the catalog, the states toolkit and both bound
engines together.

Each check returns a :class:`CheckResult`. Failures carry enough information
(seed, dimension, sample index, state pair) to replay them one at a time with
:func:`sample_margins`.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from pinsker import analytic, engine
from pinsker.divergences import (
    LN2,
    DivergenceSpec,
    Family,
    eval_binary,
    hellinger,
    renyi,
    smoothed_max,
)
from pinsker.states import classicalize, eval_quantum, sample_pair, trace_distance

CHECKS = ("scatter", "dpi", "sandwich", "breakpoints", "ordering", "smoothing", "legendre")
RENYI_LIKE = (Family.RENYI, Family.FIDELITY, Family.COLLISION)
MAX_DUMPS = 5


def default_families() -> tuple[DivergenceSpec, ...]:
    return (
        hellinger(2.0),
        DivergenceSpec(Family.NEYMAN_CHI2),
        DivergenceSpec(Family.PEARSON_CHI2),
        renyi(4.0 / 3.0),
        DivergenceSpec(Family.FIDELITY),
        DivergenceSpec(Family.UMEGAKI),
        DivergenceSpec(Family.COLLISION),
        DivergenceSpec(Family.MAX),
        smoothed_max(0.2),
    )


def default_tolerances() -> dict[str, float]:
    return {"sample": 1e-7, "tight": 1e-4, "exact": 1e-9, "trace": 1e-10,
            "slope": 1e-3, "legendre": 1e-6}


@dataclass
class SuiteConfig:
    """What to check and how hard."""

    families: tuple[DivergenceSpec, ...] = field(default_factory=default_families)
    dims: tuple[int, ...] = (2, 3, 4, 5)
    pairs_per_dim: int = 2500
    t_grid_size: int = 99
    lambda_grid: tuple[int, float, float] = engine.DEFAULT_GRID
    seed: int = 0
    tolerances: dict[str, float] = field(default_factory=default_tolerances)
    checks: tuple[str, ...] = CHECKS

    def __post_init__(self):
        if self.pairs_per_dim < 1:
            raise ValueError("pairs_per_dim must be >= 1")
        if not self.dims or any(not 2 <= d <= 16 for d in self.dims):
            raise ValueError("dims must lie in [2, 16]")
        unknown = set(self.checks) - set(CHECKS)
        if unknown:
            raise ValueError(f"unknown checks: {sorted(unknown)}")
        self.tolerances = {**default_tolerances(), **self.tolerances}

    def t_grid(self) -> np.ndarray:
        return np.linspace(0.01, 0.99, self.t_grid_size)


@dataclass
class CheckResult:
    check: str
    family: str
    passed: bool
    worst_margin: float
    n_checked: int
    n_infinite: int = 0
    counterexamples: list[dict] = field(default_factory=list)


@dataclass
class SuiteReport:
    results: list[CheckResult]
    wall_clock: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if not r.passed]

    def to_dict(self) -> dict:
        return {"passed": self.passed, "wall_clock": self.wall_clock,
                "results": [asdict(r) for r in self.results]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=_json_default)

    def to_text(self) -> str:
        lines = []
        for r in self.results:
            status = "PASS" if r.passed else "FAIL"
            lines.append(f"{status}  {r.check:<12} {r.family:<34} worst margin "
                         f"{r.worst_margin:+.3e}  n={r.n_checked}"
                         + (f"  inf={r.n_infinite}" if r.n_infinite else ""))
            for c in r.counterexamples:
                where = ", ".join(f"{k}={v}" for k, v in c.items()
                                  if k not in ("rho", "sigma"))
                lines.append(f"      counterexample: {where}")
        lines.append(f"{'all checks passed' if self.passed else 'FAILED'} "
                     f"({len(self.results)} checks, {self.wall_clock:.1f} s)")
        return "\n".join(lines)


def _json_default(o):
    if isinstance(o, float) and not math.isfinite(o):
        return str(o)
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(type(o).__name__)


def _dump_matrix(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def bound_value(spec: DivergenceSpec, t: float) -> float:
    """Closed form when available, otherwise the numeric chain."""
    return engine.convex_bound(spec, t)[0]


def pinsker(t: float) -> float:
    """Pinsker's lower bound on the relative entropy in bits."""
    return 2.0 / LN2 * t * t


# ---------------------------------------------------------------------------
# state-sample checks


def _variants(spec: DivergenceSpec) -> tuple[str, ...]:
    return ("petz", "sandwiched") if spec.canonical().family in RENYI_LIKE else ("petz",)


def _quantum_families(cfg: SuiteConfig) -> list[DivergenceSpec]:
    return [s for s in cfg.families if s.canonical().family is not Family.SMOOTHED_MAX]


def _margin(upper: float, lower: float) -> float:
    # +inf dominates everything, including another +inf
    return math.inf if upper == math.inf else upper - lower


def sample_margins(spec: DivergenceSpec, seed: int, dim: int, index: int,
                   variant: str = "petz") -> dict[str, float]:
    """Every inequality margin for one sampled pair; negative means violated.

    ``index = -1`` replays the injected identical pair.
    """
    if index < 0:
        rho, _ = sample_pair(seed, dim, 0)
        sigma = rho
    else:
        rho, sigma = sample_pair(seed, dim, index)
    t = trace_distance(rho, sigma)
    d_q = eval_quantum(spec, rho, sigma, variant)
    pair = classicalize(rho, sigma)
    d_b = eval_binary(spec, pair)
    b = bound_value(spec, min(t, 1.0))
    out = {
        "T": t,
        "D": d_q,
        "trace": -abs((pair.r - pair.s) - t),
        "scatter": _margin(d_q, b),
        "dpi_quantum": _margin(d_q, d_b),
        "dpi_bound": _margin(d_b, b),
    }
    if spec.canonical().family is Family.UMEGAKI:
        out["pinsker"] = _margin(d_q, pinsker(t))
    return out


def _sample_check(cfg: SuiteConfig, name: str, keys: dict[str, str]) -> list[CheckResult]:
    results = []
    for spec in _quantum_families(cfg):
        for variant in _variants(spec):
            worst, n, n_inf, dumps = math.inf, 0, 0, []
            indices = [(dim, i) for dim in cfg.dims for i in range(cfg.pairs_per_dim)]
            if name == "scatter":
                indices.append((cfg.dims[0], -1))
            for dim, i in indices:
                m = sample_margins(spec, cfg.seed, dim, i, variant)
                n += 1
                if math.isinf(m["D"]):
                    n_inf += 1
                for key, tol_name in keys.items():
                    if key not in m:
                        continue
                    margin = m[key]
                    if math.isnan(margin):
                        margin = -math.inf
                    worst = min(worst, margin)
                    if margin < -cfg.tolerances[tol_name] and len(dumps) < MAX_DUMPS:
                        rho, sigma = sample_pair(cfg.seed, dim, max(i, 0))
                        dumps.append({"family": spec.family.value, "alpha": spec.alpha,
                                      "epsilon": spec.epsilon,
                                      "seed": cfg.seed, "dim": dim, "index": i,
                                      "variant": variant, "inequality": key,
                                      "margin": margin, "rho": _dump_matrix(rho),
                                      "sigma": _dump_matrix(rho if i < 0 else sigma)})
            label = spec.label + ("" if variant == "petz" else " sandwiched")
            results.append(CheckResult(name, label, not dumps, worst, n, n_inf, dumps))
    return results


def replay(counterexample: dict) -> float:
    """Recompute the margin recorded in a state-sample counterexample."""
    c = counterexample
    spec = DivergenceSpec(Family(c["family"]), c["alpha"], c["epsilon"])
    m = sample_margins(spec, c["seed"], c["dim"], c["index"], c["variant"])
    return m[c["inequality"]]


def run_scatter_check(cfg: SuiteConfig) -> list[CheckResult]:
    """Every sample ``(T, D)`` lies above the convex bound (and Pinsker)."""
    return _sample_check(cfg, "scatter", {"scatter": "sample", "pinsker": "sample"})


def run_dpi_check(cfg: SuiteConfig) -> list[CheckResult]:
    """Quantum value >= classicalized value >= bound, trace distance kept."""
    return _sample_check(cfg, "dpi", {"dpi_quantum": "sample", "dpi_bound": "sample",
                                      "trace": "trace"})


# ---------------------------------------------------------------------------
# bound-level checks


def _result(check: str, family: str, margins, tol: float, where) -> CheckResult:
    margins = np.asarray(margins, dtype=float)
    bad = np.nonzero(~(margins >= -tol))[0]
    dumps = [{"index": int(i), "at": float(where[i]), "margin": float(margins[i])}
             for i in bad[:MAX_DUMPS]]
    worst = float(np.min(margins)) if len(margins) else math.inf
    return CheckResult(check, family, len(bad) == 0, worst, len(margins), 0, dumps)


def _chain(spec: DivergenceSpec, cfg: SuiteConfig, direct: bool = False):
    n, lo, hi = cfg.lambda_grid
    return engine.numeric_bound(spec, n, lo, hi, direct=direct)


def sandwich_margins(spec: DivergenceSpec, chain, ts: np.ndarray, tight: float
                     ) -> tuple[np.ndarray, np.ndarray]:
    """Margins of ``chain <= closed form <= chain + tight`` on the validity range."""
    lo, hi = analytic.validity_range(spec)
    ts = ts[(ts >= lo) & (ts <= hi)]
    cf = np.array([analytic.convex_bound_analytic(spec, t) for t in ts])
    ch = np.asarray(chain(ts))
    return ts, np.minimum(cf - ch, tight - (cf - ch))


def run_sandwich_check(cfg: SuiteConfig) -> list[CheckResult]:
    out = []
    ts = cfg.t_grid()
    for spec in cfg.families:
        if spec.canonical().family is Family.RENYI and spec.alpha < 1.0:
            continue
        where, m = sandwich_margins(spec, _chain(spec, cfg), ts, cfg.tolerances["tight"])
        # the upper side allows tight slack; the lower side is checked at exact tolerance
        out.append(_result("sandwich", spec.label, m, cfg.tolerances["exact"], where))
    return out


def _bound_fn(spec: DivergenceSpec):
    def f(t: float) -> float:
        v = analytic.convex_bound_analytic(spec, t)
        return v if v is not None else engine.convex_bound_numeric(spec, t)
    return f


def breakpoint_gaps(spec: DivergenceSpec, t0: float, h: float = engine.FD_STEP
                    ) -> tuple[float, float]:
    """Value and slope mismatch of the two pieces meeting at ``t0``.

    Each piece is extrapolated to ``t0`` from its own side to second order;
    slopes are one-sided finite differences with step ``h``.
    """
    f = _bound_fn(spec)
    b0 = f(t0)
    bl1, bl2 = f(t0 - h), f(t0 - 2 * h)
    br1, br2 = f(t0 + h), f(t0 + 2 * h)
    left_val, right_val = 2 * bl1 - bl2, 2 * br1 - br2
    value_gap = max(abs(left_val - b0), abs(right_val - b0))
    slope_gap = abs((b0 - bl1) / h - (br1 - b0) / h)
    return value_gap, slope_gap


def run_breakpoint_check(cfg: SuiteConfig) -> list[CheckResult]:
    out = []
    for spec in cfg.families:
        if spec.canonical().family is Family.SMOOTHED_MAX:
            continue  # the corner at T = epsilon is not smooth
        for t0 in analytic.breakpoints(spec).ts:
            vg, sg = breakpoint_gaps(spec, t0)
            margins = [cfg.tolerances["exact"] - vg, cfg.tolerances["slope"] - sg]
            out.append(_result("breakpoints", f"{spec.label} T={t0:.6g}", margins,
                               0.0, [t0, t0]))
    return out


ORDERING = (0.5, 1.0, 4.0 / 3.0, 2.0, math.inf)


def ordering_margins(ts: np.ndarray) -> np.ndarray:
    """``B_next - B_prev + slack`` along the Renyi chain of orders, per grid point."""
    rows = []
    for a in ORDERING:
        spec = renyi(a)
        row = []
        for t in ts:
            v = analytic.convex_bound_analytic(spec, t)
            row.append((float(engine.numeric_bound(spec)(t)), 1e-4) if v is None else (v, 1e-9))
        rows.append(row)
    margins = []
    for lower, upper in zip(rows[:-1], rows[1:]):
        for (a, sa), (b, sb) in zip(lower, upper):
            margins.append(b - a + max(sa, sb))
    return np.array(margins)


def run_ordering_check(cfg: SuiteConfig) -> list[CheckResult]:
    ts = cfg.t_grid()
    m = ordering_margins(ts)
    return [_result("ordering", "renyi 1/2 <= 1 <= 4/3 <= 2 <= inf", m, 0.0,
                    np.tile(ts, len(ORDERING) - 1))]


def run_smoothing_check(cfg: SuiteConfig) -> list[CheckResult]:
    """Shifted max-divergence chain against the smoothed closed form."""
    out = []
    ts = np.linspace(0.0, 1.0, cfg.t_grid_size + 2)
    targets = []
    for spec in cfg.families:
        fam = spec.canonical().family
        if fam is Family.SMOOTHED_MAX:
            targets.append(spec)
        elif fam is Family.MAX:
            targets.append(smoothed_max(0.2))
    for target in dict.fromkeys(targets):
        chain = _chain(target, cfg)
        cf = np.array([analytic.convex_bound_analytic(target, t) for t in ts])
        diff = cf - np.asarray(chain(ts))
        m = np.minimum(diff, cfg.tolerances["tight"] - diff)
        zero = np.where(ts <= target.epsilon, -np.abs(np.asarray(chain(ts))), 0.0)
        out.append(_result("smoothing", target.label, np.minimum(m, zero),
                           cfg.tolerances["exact"], ts))
    return out


def legendre_margins(chain: engine.ChainBound) -> np.ndarray:
    lb = chain.source
    t, b = chain.vertices()
    rederived = np.min(b[None, :] - lb.lambdas[:, None] * t[None, :], axis=1)
    return -np.abs(rederived - lb.values)


def run_legendre_check(cfg: SuiteConfig) -> list[CheckResult]:
    out = []
    for spec in cfg.families:
        chain = _chain(spec, cfg, direct=True)
        m = legendre_margins(chain)
        out.append(_result("legendre", spec.label, m, cfg.tolerances["legendre"],
                           chain.source.lambdas))
    return out


def run_consistency_check(cfg: SuiteConfig) -> list[CheckResult]:
    """Analytic-versus-numeric checks selected by ``cfg.checks``."""
    runners = {"sandwich": run_sandwich_check, "breakpoints": run_breakpoint_check,
               "ordering": run_ordering_check, "smoothing": run_smoothing_check,
               "legendre": run_legendre_check}
    out = []
    for name, fn in runners.items():
        if name in cfg.checks:
            out.extend(fn(cfg))
    return out


def run_suite(cfg: SuiteConfig | None = None) -> SuiteReport:
    cfg = cfg or SuiteConfig()
    start = time.perf_counter()
    results: list[CheckResult] = []
    if "scatter" in cfg.checks:
        results.extend(run_scatter_check(cfg))
    if "dpi" in cfg.checks:
        results.extend(run_dpi_check(cfg))
    results.extend(run_consistency_check(cfg))
    return SuiteReport(results, time.perf_counter() - start)
