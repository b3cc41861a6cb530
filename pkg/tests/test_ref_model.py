
import numpy as np
import pytest
from hypothesis import given, strategies as st

from cplmfc.errors import DomainError
from cplmfc.ref_model import (
    DEFAULT_ZETA,
    CplmSpec,
    CplmState,
    cplm_analytic_response,
    cplm_step,
    design_omega_n,
    gains_from_model,
)


@pytest.mark.parametrize(
    "zeta,x_s,t_s,wn",
    [(DEFAULT_ZETA, 7.74, 10, 1.0946), (DEFAULT_ZETA, 9.98, 10, 1.4114), (1.0, 1.0, 1.0, 1.0)],
)
def test_design_omega_n(zeta, x_s, t_s, wn):
    assert design_omega_n(zeta, x_s, t_s) == pytest.approx(wn, abs=1e-4)


def test_design_omega_n_rejects_bad_settling():
    with pytest.raises(DomainError):
        design_omega_n(DEFAULT_ZETA, 7.74, 0.0)


def test_gains_unit_model():
    ki, kd = gains_from_model(1.0, CplmSpec(1.0))
    assert ki == pytest.approx(0.70711, abs=1e-5)
    assert kd == pytest.approx(0.70711, abs=1e-5)


def test_gains_benchmark_model():
    ki, kd = gains_from_model(6.22, CplmSpec(1.0946))
    assert ki == pytest.approx(4.813, abs=2e-3)
    assert kd == pytest.approx(4.018, abs=2e-3)


def test_zero_gain():
    assert gains_from_model(0.0, CplmSpec(2.0)) == (0.0, 0.0)


@given(st.floats(1e-3, 1e3), st.floats(1e-2, 1e2), st.floats(0.05, 0.99))
def test_gain_identities(kp, wn, zeta):
    spec = CplmSpec(wn, zeta)
    ki, kd = gains_from_model(kp, spec)
    assert ki * spec.Ti == pytest.approx(kp, rel=1e-12)
    assert kd == pytest.approx(kp * spec.Td, rel=1e-12)
    assert spec.Ti / spec.Td == pytest.approx(4 * zeta**2, rel=1e-12)


def test_poles_match_eigenvalues():
    spec = CplmSpec(1.7)
    ev = np.sort_complex(np.linalg.eigvals(spec.matrices()[0]))
    expected = np.sort_complex(-DEFAULT_ZETA * 1.7 * np.array([1 + 1j, 1 - 1j]))
    np.testing.assert_allclose(ev, expected, atol=1e-9)


def test_analytic_initial_values():
    assert cplm_analytic_response(0.0, CplmSpec(1.0, b=1, c=0)) == pytest.approx(0.0, abs=1e-15)
    assert cplm_analytic_response(0.0, CplmSpec(1.0, b=0, c=0)) == pytest.approx(0.0, abs=1e-15)
    assert cplm_analytic_response(200.0, CplmSpec(1.0)) == pytest.approx(1.0, abs=1e-12)


def test_analytic_rejects_negative_time():
    with pytest.raises(DomainError):
        cplm_analytic_response(-1.0, CplmSpec(1.0))


@pytest.mark.parametrize("zeta", [0.0, 1.0, 1.5])
def test_underdamped_only(zeta):
    with pytest.raises(DomainError):
        CplmSpec(1.0, zeta)


@pytest.mark.parametrize("b,c", [(0, 0), (1, 0), (0.4, 0.7), (1, 1)])
def test_rk4_matches_analytic(b, c):
    spec = CplmSpec(1.2, b=b, c=c)
    st_ = CplmState(spec)
    dt = 0.05
    worst = abs(st_.output(1.0) - cplm_analytic_response(0.0, spec))
    for k in range(1, 200):
        st_, y = cplm_step(st_, 1.0, dt, substeps=10)
        worst = max(worst, abs(y - cplm_analytic_response(k * dt, spec)))
    assert worst < 1e-6


@pytest.mark.parametrize("b,c", [(0, 0), (1, 0), (0.3, 0.6)])
def test_unity_dc_gain(b, c):
    st_ = CplmState(CplmSpec(2.0, b=b, c=c))
    for _ in range(400):
        st_, y = cplm_step(st_, 1.0, 0.05, substeps=10)
    assert abs(y - 1.0) < 1e-4


def test_frequency_scaling_invariance():
    a, b2 = CplmSpec(1.0, b=0.5), CplmSpec(3.0, b=0.5)
    t = np.linspace(0, 12, 50)
    np.testing.assert_allclose(cplm_analytic_response(t, a), cplm_analytic_response(t / 3.0, b2), atol=1e-12)


def test_coarse_step_rejected():
    with pytest.raises(DomainError):
        cplm_step(CplmState(CplmSpec(10.0)), 1.0, 0.1, substeps=1)
