import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cplmfc.errors import ParameterError
from cplmfc.nlsig import NlsigParams, nlsig, nlsig_eval

finite = st.floats(-1e3, 1e3, allow_nan=False)


def test_midpoint_is_half():
    assert nlsig(0.0, 1, -1, 1, 0) == pytest.approx(0.5, abs=1e-15)


def test_upper_knot_value():
    assert nlsig(1.0, 1, -1, 1, 0) == pytest.approx(1 / (1 + math.exp(-6)), rel=1e-12)
    assert nlsig(1.0, 1, -1, 1, 0) == pytest.approx(0.99753, abs=1e-5)


def test_decreasing_mirror():
    xs = np.linspace(-3, 3, 101)
    up = nlsig(xs, 1, -1, 1, 0, 1, 6.0, 0)
    down = nlsig(xs, 1, -1, 1, 0, 1, 6.0, 1)
    np.testing.assert_allclose(up + down, 1.0, atol=1e-12)


def test_saturates_without_overflow():
    assert nlsig(1e300, 1, -1, 2, -2) == pytest.approx(2.0)
    assert nlsig(-1e300, 1, -1, 2, -2) == pytest.approx(-2.0)


def test_staircase_passes_interior_knots():
    p = NlsigParams(3.0, 0.0, 3.0, 0.0, n=3, lam=6.0)
    for xk, yk in zip(p.knots_x[1:-1], p.knots_y[1:-1]):
        assert abs(nlsig_eval(xk, p) - yk) < 1e-3


def test_scalar_in_scalar_out():
    assert isinstance(nlsig(0.2, 1, 0, 1, 0), float)
    assert nlsig(np.zeros(4), 1, 0, 1, 0).shape == (4,)


@pytest.mark.parametrize(
    "args",
    [(1, 1, 1, 0), (0, 1, 1, 0), (1, 0, 1, 0, 0), (1, 0, 1, 0, 1, 0.0), (1, 0, 1, 0, 1, 6.0, 2), (math.inf, 0, 1, 0)],
)
def test_invalid_parameters(args):
    with pytest.raises(ParameterError):
        nlsig(0.5, *args)


def test_non_finite_input():
    with pytest.raises(ParameterError):
        nlsig(math.nan, 1, 0, 1, 0)


@given(finite, finite, st.integers(0, 1))
def test_monotone_in_direction(a, b, xi):
    lo, hi = sorted((a, b))
    if hi - lo < 1e-6:
        return
    p = NlsigParams(10.0, -10.0, 5.0, -5.0, xi=xi)
    ya, yb = nlsig_eval(lo, p), nlsig_eval(hi, p)
    assert (yb >= ya) if xi == 0 else (yb <= ya)


@given(finite, st.integers(1, 5), st.floats(0.05, 20))
def test_bounded_by_limits(x, n, lam):
    p = NlsigParams(4.0, -2.0, 3.0, -1.0, n=n, lam=lam)
    y = nlsig_eval(x, p)
    assert -1.0 <= y <= 3.0


@given(st.floats(-5, 5), st.floats(1e-9, 1e-6))
def test_continuity(x, h):
    p = NlsigParams(1.0, -1.0, 1.0, 0.0)
    assert abs(nlsig_eval(x + h, p) - nlsig_eval(x, p)) < 10 * h
