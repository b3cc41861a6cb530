import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cplmfc.errors import ParameterError, SimulationFault
from cplmfc.plant_sim import LtiPlant, PmlmPlant


def step_trace(plant, n, u=1.0):
    return np.array([plant.step(u) for _ in range(n)])


def test_third_order_step_at_one_second():
    y = step_trace(LtiPlant([1], [1, 3, 3, 1], dt=0.1), 10)
    assert y[-1] == pytest.approx(1 - math.exp(-1) * 2.5, abs=1e-4)


@pytest.mark.parametrize(
    "num,den,exact",
    [
        ([1], [1, 1], lambda t: 1 - np.exp(-t)),
        ([4], [1, 2, 4], lambda t: 1 - np.exp(-t) * (np.cos(math.sqrt(3) * t) + np.sin(math.sqrt(3) * t) / math.sqrt(3))),
        ([1], [1, 3, 3, 1], lambda t: 1 - np.exp(-t) * (1 + t + t * t / 2)),
    ],
)
def test_step_responses_match_analytic(num, den, exact):
    y = step_trace(LtiPlant(num, den, dt=0.1), 100)
    t = 0.1 * np.arange(1, 101)
    np.testing.assert_allclose(y, exact(t), atol=1e-4)


def test_dc_gain_reached():
    p = LtiPlant([1], [1, 3, 3, 1], dt=0.1)
    assert step_trace(p, 400)[-1] == pytest.approx(1.0, abs=1e-6)
    assert p.dc_gain == 1.0


def test_delay_shifts_exactly():
    a = step_trace(LtiPlant([1], [1, 3, 3, 1], dt=0.1), 60)
    b = step_trace(LtiPlant([1], [1, 3, 3, 1], dt=0.1, tau_l=1.0), 60)
    np.testing.assert_allclose(b[10:], a[:-10], atol=1e-12)
    assert np.all(b[:10] == 0)


def test_delays_compose():
    rng = np.random.default_rng(3)
    u = rng.normal(size=80)
    p1 = LtiPlant([1], [1, 1], dt=0.1, tau_l=0.3)
    p2 = LtiPlant([1], [1, 1], dt=0.1, tau_l=0.5)
    ya = [p1.step(v) for v in u]
    yb = [p2.step(v) for v in u]
    np.testing.assert_allclose(yb[2:], ya[:-2], atol=1e-12)


def test_input_clamp():
    p = LtiPlant([1], [1, 1], u_max=0.5, dt=0.1)
    assert step_trace(p, 200, 10.0)[-1] == pytest.approx(0.5, abs=1e-6)


def test_disturbance_reaches_dc_gain():
    p = LtiPlant([1], [1, 3, 3, 1], dt=0.1).add_disturbance(1.0)
    assert step_trace(p, 400, 0.0)[-1] == pytest.approx(1.0, abs=1e-6)


def test_zero_disturbance_is_identity():
    a = step_trace(LtiPlant([1], [1, 2, 1], dt=0.1), 30)
    b = step_trace(LtiPlant([1], [1, 2, 1], dt=0.1).add_disturbance(0.0), 30)
    np.testing.assert_array_equal(a, b)


def test_disturbance_respects_delay():
    p = LtiPlant([1], [1, 1], dt=0.1, tau_l=0.5)
    for _ in range(5):
        p.step(0.0)
    p.add_disturbance(1.0)
    y = step_trace(p, 10, 0.0)
    assert np.all(y[:5] == 0) and y[5] > 0


def test_reset_restores_rest():
    p = LtiPlant([1], [1, 1], dt=0.1, tau_l=0.2)
    a = step_trace(p, 20)
    p.reset()
    np.testing.assert_array_equal(step_trace(p, 20), a)


def test_biproper_feedthrough():
    p = LtiPlant([2, 1], [1, 1], dt=0.1)
    p.step(1.0)
    assert p.output == pytest.approx(1.0 + math.exp(-0.1), abs=1e-6)


@pytest.mark.parametrize("num,den", [([1, 0, 0], [1, 1]), ([1], [0]), ([1], [])])
def test_bad_transfer_function(num, den):
    with pytest.raises(ParameterError):
        LtiPlant(num, den)


def test_non_finite_input():
    with pytest.raises(SimulationFault):
        LtiPlant([1], [1, 1]).step(math.nan)


def test_long_run_stays_finite():
    p = LtiPlant([1], [1, 3, 3, 1], dt=0.1, substeps=1)
    rng = np.random.default_rng(0)
    for v in rng.uniform(-1, 1, 20000):
        p.step(v)
    assert np.all(np.isfinite(p.x)) and abs(p.output) < 5


def test_pmlm_rest():
    p = PmlmPlant()
    assert p.ripple(0.0) == 0.0 and p.friction(0.0) == 0.0
    assert step_trace(p, 50, 0.0)[-1] == 0.0


def test_pmlm_ripple_peak():
    assert PmlmPlant().ripple(0.0712 / 4) == pytest.approx(3.0)


def test_pmlm_double_integrator_without_damping():
    p = PmlmPlant(m=2.0, b_damp=0.0, ripple_amp=0.0, coulomb=0.0, viscous=0.0, dt=0.01)
    y = step_trace(p, 100, 1.0)
    assert y[-1] == pytest.approx(0.5 * 8.1 / 2.0 * 1.0**2, rel=1e-9)


def test_pmlm_exact_sign_option():
    p = PmlmPlant(eps=0.0)
    assert p.friction(1e-9) == pytest.approx(3.0, abs=1e-6)
    assert p.friction(-2.0) == -(3 + 20)


@settings(max_examples=20, deadline=None)
@given(st.floats(-0.5, 0.5), st.floats(0.05, 1.0))
def test_pmlm_energy_decays_without_input(y0, v0):
    p = PmlmPlant(ripple_amp=0.0)
    p.y, p.v = y0, v0
    energies = []
    for _ in range(200):
        p.step(0.0)
        energies.append(0.5 * p.m * p.v**2)
    assert np.all(np.diff(energies) <= 1e-12)


def test_pmlm_regularization_effect_small():
    def run(eps):
        p = PmlmPlant(eps=eps, dt=0.001)
        return step_trace(p, 500, 2.0)
    np.testing.assert_allclose(run(1e-4), run(1e-6), atol=1e-3)


def test_pmlm_dt_mismatch():
    with pytest.raises(ParameterError):
        PmlmPlant(dt=0.001).step(1.0, dt=0.01)
