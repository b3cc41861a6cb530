import math

import numpy as np
import pytest

from cplmfc.errors import DomainError
from cplmfc.fuzzy_map import (
    CORNER_TIMES,
    FisConfig,
    default_fis_config,
    derive_normalized_times,
    lookup_times_fis,
    lookup_times_fsm,
    membership,
)
from cplmfc.ref_model import CplmSpec, cplm_analytic_response


@pytest.mark.parametrize("bc", list(CORNER_TIMES))
def test_fsm_corners(bc):
    t = lookup_times_fsm(*bc)
    assert (t.x_pk, t.x_s) == CORNER_TIMES[bc]


def test_fsm_nearest_corner():
    assert lookup_times_fsm(0.7, 0.2) == lookup_times_fsm(1, 0)
    assert lookup_times_fsm(0.2, 0.9) == lookup_times_fsm(0, 1)


@pytest.mark.parametrize("bc", list(CORNER_TIMES))
def test_fis_reproduces_corners(bc):
    t = lookup_times_fis(*bc)
    x_pk, x_s = CORNER_TIMES[bc]
    assert t.x_pk == pytest.approx(x_pk, abs=1e-6)
    assert t.x_s == pytest.approx(x_s, abs=1e-6)


def test_fis_interior_between_corners():
    t = lookup_times_fis(0.5, 0.0)
    assert 7.74 < t.x_s < 9.98


def test_fis_rule_count():
    assert default_fis_config().rule_count == 121


def test_singleton_width_gives_exact_corner():
    cfg = default_fis_config()
    narrow = FisConfig(cfg.centers, 0.0, cfg.pk_consequents, cfg.s_consequents)
    t = lookup_times_fis(1.0, 0.0, narrow)
    assert (t.x_pk, t.x_s) == CORNER_TIMES[(1, 0)]


def test_fis_smooth_along_edge():
    xs = [lookup_times_fis(b, 0.0).x_s for b in np.linspace(0, 1, 41)]
    assert np.all(np.abs(np.diff(xs)) < 0.6)


def test_membership_shape():
    assert membership(0.5, 0.5, 0.1) == pytest.approx(1.0, abs=1e-2)
    assert membership(0.3, 0.5, 0.1) < 1e-3
    assert membership(0.7, 0.5, 0.1) < 1e-3


# frozen oracle values, unit natural frequency
@pytest.mark.parametrize(
    "bc,x_pk,x_s",
    [((0, 0), 4.4429, 9.9965), ((1, 0), 2.2214, 7.7750), ((0, 1), 5.5536, 11.1072), ((1, 1), 5.5536, 11.1072)],
)
def test_oracle_values(bc, x_pk, x_s):
    t = derive_normalized_times(*bc)
    assert t.x_pk == pytest.approx(x_pk, abs=1e-3)
    assert t.x_s == pytest.approx(x_s, abs=1e-3)


def test_oracle_peak_is_stationary_point():
    spec = CplmSpec(1.0, b=0.3, c=0.2)
    t = derive_normalized_times(0.3, 0.2)
    h = 1e-5
    d = (cplm_analytic_response(t.x_pk + h, spec) - cplm_analytic_response(t.x_pk - h, spec)) / (2 * h)
    assert abs(d) < 1e-6
    assert cplm_analytic_response(t.x_pk, spec) > 1.0


def test_oracle_undershoot_point_below_setpoint():
    spec = CplmSpec(1.0, b=0.0, c=0.0)
    t = derive_normalized_times(0.0, 0.0)
    assert cplm_analytic_response(t.x_s, spec) < 1.0


def test_identity_model_starts_at_setpoint():
    assert cplm_analytic_response(0.0, CplmSpec(1.0, b=1.0, c=1.0)) == pytest.approx(1.0)


def test_table_ordering():
    assert derive_normalized_times(1, 0).x_s < derive_normalized_times(0, 0).x_s < derive_normalized_times(0, 1).x_s


@pytest.mark.parametrize("b,c", [(-0.1, 0), (0, 1.1), (math.nan, 0)])
def test_weights_out_of_range(b, c):
    with pytest.raises(DomainError):
        lookup_times_fsm(b, c)
    with pytest.raises(DomainError):
        derive_normalized_times(b, c)
