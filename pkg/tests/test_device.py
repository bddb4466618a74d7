import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ccosim.device import (
    DeviceParams,
    OperatingRegion,
    classify_region,
    drain_current,
    ids,
    ids_array,
    trajectory_average,
)

P = DeviceParams()
volts = st.floats(0.0, 1.2, allow_nan=False)


def test_defaults():
    assert (P.beta, P.vt, P.alpha) == (1.0, 0.3, 1.3)
    assert P.gamma == pytest.approx(2 / 3)


@pytest.mark.parametrize("kw", [{"beta": 0}, {"vt": -0.1}, {"alpha": 0.9}, {"alpha": 2.5}, {"gamma": 0}])
def test_rejects_bad_params(kw):
    with pytest.raises(ValueError):
        DeviceParams(**kw)


def test_saturation_value():
    # 0.5 * (0.9 - 0.3)^1.3
    assert drain_current(OperatingRegion.Saturation, 0.9, 0.9, P) == pytest.approx(0.5 * 0.6**1.3)


def test_linear_value():
    assert drain_current(OperatingRegion.Linear, 0.9, 0.1, P) == pytest.approx(0.6**0.65 * 0.1)


def test_alpha_two_is_square_law():
    p = DeviceParams(alpha=2.0)
    ov = 0.4
    assert drain_current(OperatingRegion.Saturation, ov + p.vt, 1.0, p) == pytest.approx(0.5 * ov**2)
    # with alpha = 2 the linear formula is beta * ov * vds
    assert drain_current(OperatingRegion.Linear, ov + p.vt, 0.1, p) == pytest.approx(ov * 0.1)


def test_below_threshold_region_mismatch_raises():
    with pytest.raises(ValueError):
        drain_current(OperatingRegion.Saturation, 0.2, 0.5, P)
    assert drain_current(OperatingRegion.CutOff, 0.2, 0.5, P) == 0.0


def test_classify_edges():
    assert classify_region(0.3, 0.5, P) is OperatingRegion.CutOff
    assert classify_region(0.9, 0.61, P) is OperatingRegion.Saturation
    assert classify_region(0.9, 0.59, P) is OperatingRegion.Linear


def test_reverse_bias_is_zero():
    assert ids(0.9, -0.1, P) == 0.0
    assert ids(0.9, 0.0, P) == 0.0


@given(volts, volts)
def test_ids_non_negative_and_vectorised(vgs, vds):
    v = ids(vgs, vds, P)
    assert v >= 0
    assert ids_array([vgs], [vds], P)[0] == pytest.approx(v, abs=1e-15)


@given(st.floats(0.31, 1.2), st.floats(0.31, 1.2), st.floats(0.0, 1.2))
def test_saturation_monotone_in_vgs(a, b, vds):
    lo, hi = sorted((a, b))
    sat_lo = drain_current(OperatingRegion.Saturation, lo, vds, P)
    sat_hi = drain_current(OperatingRegion.Saturation, hi, vds, P)
    assert sat_hi >= sat_lo


@given(st.floats(0.4, 1.2), st.floats(0.01, 0.05))
def test_linear_proportional_to_vds(vgs, vds):
    a = drain_current(OperatingRegion.Linear, vgs, vds, P)
    b = drain_current(OperatingRegion.Linear, vgs, 2 * vds, P)
    assert b == pytest.approx(2 * a)


def test_trajectory_average_constant_sweep():
    avg = trajectory_average(OperatingRegion.Saturation, (0.9, 0.9), (0.6, 0.6), P)
    assert avg == pytest.approx(0.5 * 0.6**1.3)


def test_trajectory_average_linear_in_vds():
    # saturation current does not depend on vds; linear sweep of vds averages to the midpoint
    avg = trajectory_average(OperatingRegion.Linear, (0.9, 0.9), (0.0, 0.2), P)
    assert avg == pytest.approx(0.6**0.65 * 0.1, rel=1e-9)


def test_trajectory_average_counts_cutoff_as_zero():
    full = trajectory_average(OperatingRegion.Saturation, (0.3, 0.9), (0.5, 0.5), P)
    # closed form: mean of 0.5 * x^1.3 for x uniform in [0, 0.6]
    assert full == pytest.approx(0.5 * 0.6**1.3 / 2.3, rel=1e-5)
    assert math.isfinite(full)


def test_ids_array_broadcast():
    out = ids_array(np.array([0.2, 0.6, 0.9]), 0.5, P)
    assert out.shape == (3,)
    assert out[0] == 0.0
