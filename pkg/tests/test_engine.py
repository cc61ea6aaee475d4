import math

import numpy as np
import pytest

from pinsker import analytic, engine
from pinsker.divergences import (
    LN2,
    DivergenceSpec,
    Family,
    binary_divergence,
    hellinger,
    renyi,
    smoothed_max,
)
from pinsker.engine import (
    LinearBound,
    OutOfDomainError,
    build_chain,
    build_linear_bound,
    legendre_transform,
    linear_bound_numeric,
    numeric_bound,
    numeric_linear_bound,
    smooth_convex,
    smooth_linear,
)

MAX = DivergenceSpec(Family.MAX)
UMEGAKI = DivergenceSpec(Family.UMEGAKI)
COLLISION = DivergenceSpec(Family.COLLISION)
NEYMAN = DivergenceSpec(Family.NEYMAN_CHI2)
FIDELITY = DivergenceSpec(Family.FIDELITY)


def lb_from(lams, vals):
    lams = np.asarray(lams, float)
    return LinearBound(MAX, lams, np.asarray(vals, float), np.full((len(lams), 2), 0.5))


# --- inner solver ---------------------------------------------------------


@pytest.mark.parametrize("spec", [MAX, UMEGAKI, NEYMAN, renyi(3.0), smoothed_max(0.2)],
                         ids=lambda s: s.label)
def test_zero_slope(spec):
    v, p = linear_bound_numeric(spec, 0.0)
    assert v == 0.0 and p.r == p.s


def test_max_at_threshold():
    v, _ = linear_bound_numeric(MAX, 1 / LN2)
    assert v == pytest.approx(0.0, abs=1e-9)


def test_collision_boundary_minimizer():
    v, p = linear_bound_numeric(COLLISION, 2 / LN2)
    assert p.r == pytest.approx(1.0, abs=1e-5)
    assert p.s == pytest.approx(0.5, abs=1e-5)
    assert v == pytest.approx(analytic.linear_bound_analytic(COLLISION, 2 / LN2), abs=1e-10)


def test_umegaki_unit_slope():
    v, p = linear_bound_numeric(UMEGAKI, 1.0)
    assert v == pytest.approx(analytic.linear_bound_analytic(UMEGAKI, 1.0), abs=1e-10)
    assert p.r == pytest.approx(2 * (1 - LN2), abs=1e-6)
    assert p.s == pytest.approx(1 / LN2 - 1, abs=1e-6)


def test_value_attained_by_minimizer():
    for spec in (UMEGAKI, hellinger(1.5), FIDELITY):
        for lam in (0.7, 3.0, 30.0):
            v, p = linear_bound_numeric(spec, lam)
            direct = float(binary_divergence(spec, p.r, p.s)) - lam * (p.r - p.s)
            assert abs(v - direct) <= 1e-9
            assert 0.0 <= p.s <= p.r <= 1.0


def test_negative_slope_rejected():
    with pytest.raises(ValueError):
        linear_bound_numeric(MAX, -1.0)


# --- linear bound on a grid -----------------------------------------------


def test_build_examples():
    lb = build_linear_bound(MAX, [0.0, 1 / LN2, 2 / LN2])
    assert lb.values == pytest.approx([0.0, 0.0, 1 - 1 / LN2], abs=1e-9)
    lb = build_linear_bound(NEYMAN, [0.0, 2.0, 4.0, 6.0])
    assert lb.values[2] == pytest.approx(-1.0, abs=1e-9)
    assert lb.values[1] == pytest.approx(-0.25, abs=1e-9)
    lb = build_linear_bound(UMEGAKI, [0.0])
    assert list(lb.values) == [0.0]


def test_grid_validation():
    with pytest.raises(ValueError):
        build_linear_bound(MAX, [0.0, 2.0, 1.0])
    with pytest.raises(ValueError):
        build_linear_bound(MAX, [])


def test_warm_start_independence():
    lams = np.geomspace(0.05, 200, 40)
    for spec in (UMEGAKI, renyi(4 / 3), NEYMAN):
        warm = build_linear_bound(spec, lams, warm_start=True)
        cold = build_linear_bound(spec, lams, warm_start=False)
        assert np.max(np.abs(warm.values - cold.values)) <= 1e-8


@pytest.mark.parametrize("spec", [MAX, UMEGAKI, COLLISION, NEYMAN, renyi(4 / 3),
                                  hellinger(1.5), smoothed_max(0.2)],
                         ids=lambda s: s.label)
def test_tangent_validity_certificate(spec):
    lb = numeric_linear_bound(spec)
    g = np.linspace(0.0, 1.0, 200)
    R, S = np.meshgrid(g, g, indexing="ij")
    mask = S <= R
    D = binary_divergence(spec, R[mask], S[mask])
    gap = R[mask] - S[mask]
    for lam, val in zip(lb.lambdas[::7], lb.values[::7]):
        assert np.min(D - lam * gap) >= val - 1e-9


@pytest.mark.parametrize("spec", [MAX, UMEGAKI, NEYMAN, renyi(4 / 3), FIDELITY],
                         ids=lambda s: s.label)
def test_linear_bound_shape(spec):
    lb = numeric_linear_bound(spec)
    lam, val = lb.lambdas, lb.values
    assert np.all(np.isfinite(val))
    assert val[0] == 0.0
    assert np.all(np.diff(val) <= 1e-12)
    # concavity: each value lies above the chord of its neighbours
    w = (lam[1:-1] - lam[:-2]) / (lam[2:] - lam[:-2])
    chord = (1 - w) * val[:-2] + w * val[2:]
    assert np.all(val[1:-1] >= chord - 1e-9)


# --- Legendre transform and chains ----------------------------------------


def test_legendre_examples():
    assert legendre_transform(numeric_linear_bound(MAX), 0.0) == 0.0
    assert legendre_transform(numeric_linear_bound(MAX), 0.5) == pytest.approx(1.0, abs=1e-4)
    assert legendre_transform(numeric_linear_bound(COLLISION), 0.25) == pytest.approx(
        math.log2(1.25), abs=1e-4)


def test_chain_single_zero_tangent():
    chain = build_chain(lb_from([0.0], [0.0]))
    assert len(chain) == 1
    assert np.all(chain(np.linspace(0, 1, 11)) == 0.0)


def test_chain_prunes_dominated():
    # 0.5 T - 1 lies below T everywhere on [0, 1]
    chain = build_chain(lb_from([0.5, 1.0], [-1.0, 0.0]))
    assert len(chain) == 1 and chain.slopes[0] == 1.0


def test_chain_prunes_lines_outside_unit_interval():
    # the slope-10 line only takes over beyond T = 1
    chain = build_chain(lb_from([0.0, 1.0, 10.0], [0.0, -0.1, -10.0]))
    assert list(chain.slopes) == [0.0, 1.0]
    t, b = chain.vertices()
    assert t == pytest.approx([0.0, 0.1, 1.0])
    assert b == pytest.approx([0.0, 0.0, 0.9])


@pytest.mark.parametrize("spec", [MAX, UMEGAKI, COLLISION, NEYMAN, FIDELITY],
                         ids=lambda s: s.label)
def test_chain_convex_nondecreasing(spec):
    chain = numeric_bound(spec)
    t = np.linspace(0, 0.999, 2001)
    b = chain(t)
    assert b[0] == pytest.approx(0.0, abs=1e-12)
    assert np.all(np.diff(b) >= -1e-12)
    assert np.all(b[:-2] - 2 * b[1:-1] + b[2:] >= -1e-9)


def test_chain_at_one_is_finite_lower_bound():
    chain = numeric_bound(MAX)
    assert math.isfinite(chain(1.0))
    assert chain(1.0) > chain(0.99)


def test_max_chain_close_to_closed_form():
    chain = numeric_bound(MAX)
    t = np.linspace(0, 0.99, 100)
    exact = np.log2(1 / (1 - t))
    assert np.max(np.abs(chain(t) - exact)) <= 1e-4
    assert np.all(chain(t) <= exact + 1e-9)


# --- smoothing ------------------------------------------------------------


def test_smooth_linear_examples():
    assert smooth_linear(MAX, 0.2, 1.0) == 0.0
    expected = 1 / LN2 - 2 + math.log2(2 * LN2) - 0.4
    assert smooth_linear(MAX, 0.2, 2.0) == pytest.approx(expected, abs=1e-12)
    assert smooth_linear(UMEGAKI, 0.3, 0.0) == 0.0
    with pytest.raises(OutOfDomainError):
        smooth_linear(MAX, 0.2, 1 / (LN2 * 0.2) + 1e-6)


def test_smooth_linear_numeric_slopes():
    # renyi 4/3 has no closed-form slope at small T; the chain supplies it
    lb = numeric_linear_bound(renyi(4 / 3))
    lam_eps, lam_max = engine.smoothing_slopes(renyi(4 / 3), 0.1, build_chain(lb))
    assert 0 < lam_eps < lam_max
    assert smooth_linear(renyi(4 / 3), 0.1, 0.5 * lam_eps, lb=lb) == 0.0


def test_smooth_convex_examples():
    cb = engine.ClosedFormBound(MAX)
    assert smooth_convex(cb, 0.2, 0.15) == 0.0
    assert smooth_convex(cb, 0.2, 0.7) == pytest.approx(1.0, abs=1e-15)
    assert smooth_convex(cb, 0.2, 1.0) == pytest.approx(math.log2(5), abs=1e-14)
    chain = numeric_bound(MAX)
    assert smooth_convex(chain, 0.2, 1.0) == pytest.approx(math.log2(5), abs=1e-4)


@pytest.mark.parametrize("spec", [MAX, UMEGAKI, FIDELITY, COLLISION, renyi(4 / 3)],
                         ids=lambda s: s.label)
def test_tiny_smoothing_is_nearly_identity(spec):
    chain = numeric_bound(spec)
    for t in np.linspace(0.01, 0.99, 50):
        assert abs(smooth_convex(chain, 1e-9, t) - chain(t)) <= 1e-6


def test_shifted_bound_object():
    sb = numeric_bound(smoothed_max(0.2))
    assert isinstance(sb, engine.ShiftedBound)
    t = np.linspace(0, 1, 51)
    assert np.all(sb(t)[t <= 0.2] == 0.0)


def test_direct_smoothed_chain_dominates_shifted_bound():
    eps = 0.2
    direct = numeric_bound(smoothed_max(eps), direct=True)
    for t in np.linspace(0.05, 0.95, 19):
        shifted = analytic.convex_bound_analytic(smoothed_max(eps), t)
        assert direct(t) >= shifted - 1e-4
        if t > eps:
            assert direct(t) == pytest.approx(math.log2((1 - eps) / (1 - t)), abs=1e-4)


# --- dispatch -------------------------------------------------------------


def test_convex_bound_dispatch():
    assert engine.convex_bound(MAX, 0.5) == (pytest.approx(1.0), "analytic")
    v, m = engine.convex_bound(renyi(4 / 3), 0.4)
    assert m == "numeric" and v > analytic.convex_bound_analytic(UMEGAKI, 0.4)
    with pytest.raises(OutOfDomainError):
        engine.convex_bound(renyi(4 / 3), 0.4, method="analytic")
    v, m = engine.convex_bound(MAX, 0.5, method="numeric")
    assert m == "numeric" and v == pytest.approx(1.0, abs=1e-4)


def test_pointwise_refinement_tightens_chain():
    spec = renyi(4 / 3)
    t0 = 0.75
    refined = engine.convex_bound_numeric(spec, t0)
    assert refined == pytest.approx(analytic.convex_bound_analytic(spec, t0), abs=1e-10)
    assert refined >= numeric_bound(spec)(t0)


def test_renyi_above_two_is_below_max_bound_at_one_over_alpha():
    # an interior minimizer beats r = 1 at alpha/((alpha-1) ln 2) once alpha > 2
    spec = renyi(2.5)
    t0 = 1 / 2.5
    value = engine.convex_bound_numeric(spec, t0)
    assert value < math.log2(1 / (1 - t0)) - 1e-4
    assert analytic.convex_bound_analytic(spec, t0) is None


def test_renyi_switch_point_joins_closed_form():
    spec = renyi(2.5)
    t_star = analytic.renyi_switch_point(2.5)
    for t in (t_star + 1e-3, 0.6, 0.9):
        assert engine.convex_bound_numeric(spec, t) == pytest.approx(
            analytic.convex_bound_analytic(spec, t), abs=1e-9)
