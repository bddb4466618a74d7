import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ccosim.power import (
    FomInputs,
    PowerModel,
    energy_band,
    energy_per_cycle_report,
    enob_for_fom,
    equal_frequency_power_gap,
    fom,
    tuning_range,
    vi_map,
)
from ccosim.ring import RingConfig


def test_fom_example():
    enob = enob_for_fom(72e-6, 500e3, 79e-15)
    assert enob == pytest.approx(9.83, abs=0.01)
    assert fom(FomInputs(72e-6, enob, 500e3)) == pytest.approx(79e-15, rel=1e-12)


def test_fom_enob_zero():
    assert fom(FomInputs(1e-3, 0, 1e3)) == pytest.approx(1e-3 / 2e3)


@given(st.floats(1e-6, 1), st.floats(0, 16), st.floats(1e3, 1e9))
def test_fom_halves_with_bandwidth(p, enob, bw):
    assert fom(FomInputs(p, enob, 2 * bw)) == pytest.approx(fom(FomInputs(p, enob, bw)) / 2)


def test_fom_validation():
    with pytest.raises(ValueError):
        FomInputs(0, 1, 1)


def test_energy_endpoint():
    # 8.8 uW at 80 MHz is 0.11 pJ per cycle
    assert 8.8e-6 / 80e6 == pytest.approx(0.11e-12)


def test_energy_band_overlaps_measured():
    rows = energy_per_cycle_report(RingConfig(), np.geomspace(10e-9, 1.5e-6, 30))
    lo, hi = energy_band(rows)
    assert lo <= 0.38e-12 and hi >= 0.11e-12


def test_zero_current_row_dropped():
    rows = energy_per_cycle_report(RingConfig(), [0.0, 1e-6])
    assert len(rows) == 1


def test_power_gap():
    assert equal_frequency_power_gap(RingConfig()) == pytest.approx(0.13, abs=0.02)


def test_power_model():
    assert PowerModel().power(1e-6) == pytest.approx(0.7 * 8e-6 + 0.3e-6)
    with pytest.raises(ValueError):
        PowerModel(vdd=0)


def test_vi_map():
    assert vi_map(0.1, 10e6) == pytest.approx(10e-9)
    assert vi_map(1.0, 1e6) == pytest.approx(1000e-9)
    assert vi_map(1.0, 10e6) == pytest.approx(vi_map(0.1, 1e6))
    assert tuning_range(10e6) == pytest.approx((10e-9, 100e-9))
    assert tuning_range(1e6) == pytest.approx((100e-9, 1000e-9))
    with pytest.raises(ValueError):
        vi_map(1.0, 0.0)
