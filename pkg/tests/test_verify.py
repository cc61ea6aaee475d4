import json
import math

import numpy as np
import pytest

from pinsker import analytic, engine, verify
from pinsker.divergences import DivergenceSpec, Family, renyi, smoothed_max
from pinsker.states import sample_pair
from pinsker.verify import SuiteConfig

UMEGAKI = DivergenceSpec(Family.UMEGAKI)
MAX = DivergenceSpec(Family.MAX)
COLLISION = DivergenceSpec(Family.COLLISION)
FIDELITY = DivergenceSpec(Family.FIDELITY)


def small(**kw):
    base = dict(families=(UMEGAKI, FIDELITY), dims=(2, 3), pairs_per_dim=20,
                checks=("scatter", "dpi"))
    base.update(kw)
    return SuiteConfig(**base)


def test_config_validation():
    with pytest.raises(ValueError):
        SuiteConfig(pairs_per_dim=0)
    with pytest.raises(ValueError):
        SuiteConfig(dims=(1, 2))
    with pytest.raises(ValueError):
        SuiteConfig(dims=(17,))
    with pytest.raises(ValueError):
        SuiteConfig(checks=("nope",))
    cfg = SuiteConfig(tolerances={"sample": 1e-6})
    assert cfg.tolerances["sample"] == 1e-6 and cfg.tolerances["exact"] == 1e-9


def test_default_families_cover_every_family():
    fams = {s.family for s in verify.default_families()}
    assert fams == set(Family)


def test_small_sample_suite_passes():
    report = verify.run_suite(small())
    assert report.passed
    assert any(r.family.endswith("sandwiched") for r in report.results)
    scatter = [r for r in report.results if r.check == "scatter"]
    # injected identical pair sits exactly on the bound
    assert all(r.n_checked == 41 for r in scatter)


def test_identical_pair_margin_is_zero():
    m = verify.sample_margins(UMEGAKI, 0, 2, -1)
    assert m["T"] == 0.0 and m["D"] == pytest.approx(0.0, abs=1e-12)
    assert m["scatter"] == pytest.approx(0.0, abs=1e-12)


def test_infinite_samples_dominate():
    assert verify._margin(math.inf, 3.0) == math.inf
    assert verify._margin(math.inf, math.inf) == math.inf


def test_commuting_pairs_give_dpi_equality():
    from pinsker.divergences import eval_binary
    from pinsker.states import classicalize, eval_quantum

    for i in range(10):
        rho, sigma = sample_pair(1, 2, i, diagonal=True)
        q = eval_quantum(UMEGAKI, rho, sigma)
        b = eval_binary(UMEGAKI, classicalize(rho, sigma))
        assert q == pytest.approx(b, abs=1e-10)


def test_report_is_deterministic():
    a = verify.run_suite(small()).to_dict()
    b = verify.run_suite(small()).to_dict()
    a.pop("wall_clock"), b.pop("wall_clock")
    assert a == b


def test_zero_tolerance_fails_with_replayable_counterexamples():
    cfg = small(tolerances={k: 0.0 for k in verify.default_tolerances()})
    report = verify.run_suite(cfg)
    assert not report.passed
    for r in report.failures():
        assert r.counterexamples
        for c in r.counterexamples:
            assert verify.replay(c) == c["margin"] < 0.0
            rho, _ = sample_pair(c["seed"], c["dim"], max(c["index"], 0))
            assert np.allclose(np.array(c["rho"])[..., 0] + 1j * np.array(c["rho"])[..., 1], rho)


def test_report_serialisations():
    report = verify.run_suite(small(pairs_per_dim=2))
    data = json.loads(report.to_json())
    assert data["passed"] is True
    assert len(data["results"]) == len(report.results)
    text = report.to_text()
    assert text.splitlines()[-1].startswith("all checks passed")


def test_collision_breakpoint_example():
    assert analytic.convex_bound_analytic(COLLISION, 0.5) == pytest.approx(1.0, abs=1e-15)
    vg, sg = verify.breakpoint_gaps(COLLISION, 0.5)
    assert vg <= 1e-9 and sg <= 1e-3


def test_smoothing_example():
    assert analytic.convex_bound_analytic(smoothed_max(0.2), 0.7) == pytest.approx(1.0)


def test_consistency_checks_on_max_and_collision():
    cfg = SuiteConfig(families=(MAX, COLLISION), checks=("sandwich", "breakpoints",
                                                          "smoothing", "legendre"))
    report = verify.run_suite(cfg)
    assert report.passed, report.to_text()
    checks = {r.check for r in report.results}
    assert checks == {"sandwich", "breakpoints", "smoothing", "legendre"}


def test_check_filtering_runs_only_requested():
    report = verify.run_suite(SuiteConfig(families=(MAX,), checks=("smoothing",)))
    assert [r.check for r in report.results] == ["smoothing"]
    assert report.results[0].family == smoothed_max(0.2).label


def test_ordering_check_passes():
    res = verify.run_ordering_check(SuiteConfig(t_grid_size=25))
    assert res[0].passed and res[0].n_checked == 4 * 25


def test_sandwich_margins_detect_a_bad_chain():
    ts = np.linspace(0.01, 0.99, 9)
    good = engine.numeric_bound(MAX)
    _, m = verify.sandwich_margins(MAX, good, ts, 1e-4)
    assert np.all(m >= -1e-9)
    _, m = verify.sandwich_margins(MAX, lambda t: np.asarray(good(t)) + 1e-3, ts, 1e-4)
    assert np.all(m < 0)


def test_renyi_above_two_breakpoint_is_c1():
    spec = renyi(2.5)
    (t0,) = analytic.breakpoints(spec).ts
    vg, sg = verify.breakpoint_gaps(spec, t0)
    assert vg <= 1e-9 and sg <= 1e-3
