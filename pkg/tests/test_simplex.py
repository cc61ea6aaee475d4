import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pinsker.simplex import nelder_mead


def test_quadratic_minimum():
    res = nelder_mead(lambda x, y: (x - 0.3) ** 2 + 2 * (y + 0.7) ** 2, (0.0, 0.0))
    assert res.converged
    assert res.x[0] == pytest.approx(0.3, abs=1e-9)
    assert res.x[1] == pytest.approx(-0.7, abs=1e-9)


def test_rosenbrock():
    res = nelder_mead(lambda x, y: (1 - x) ** 2 + 100 * (y - x * x) ** 2, (-1.2, 1.0),
                      step=0.1, maxiter=5000)
    assert res.fun < 1e-12


def test_iteration_cap():
    res = nelder_mead(lambda x, y: x * x + y * y, (5.0, 5.0), maxiter=3)
    assert res.nit == 3 and not res.converged


def test_infinite_values_rank_last():
    def f(x, y):
        return math.inf if x < 0 else (x - 1) ** 2 + y ** 2
    res = nelder_mead(f, (0.5, 0.5))
    assert res.x[0] == pytest.approx(1.0, abs=1e-8)


@given(a=st.floats(-3, 3), b=st.floats(-3, 3))
def test_finds_shifted_bowl(a, b):
    res = nelder_mead(lambda x, y: abs(x - a) + (y - b) ** 2, (0.0, 0.0), step=0.5,
                      maxiter=2000)
    assert res.x[0] == pytest.approx(a, abs=1e-7)
    assert res.x[1] == pytest.approx(b, abs=1e-4)
