import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ccosim.ring import (
    EdgeStream,
    RingConfig,
    StartupCalibration,
    average_current_ratio,
    current_for_frequency,
    edge_stream,
    frequency,
    frequency_ratio,
    if_curve,
    lumped_frequency,
    tail_current_ratio_equal_frequency,
    startup_variant_comparison,
)
from ccosim.stage import StageTopology as T

CFG = RingConfig()


def test_conventional_matches_lumped_formula():
    c = CFG.with_topology(T.Conventional8T)
    assert frequency(c) == pytest.approx(lumped_frequency(c.i_tail, 4, c.c_load, c.swing), rel=1e-12)


def test_calibrated_frequencies():
    assert frequency(CFG.with_current(1.5e-6)) == pytest.approx(80.53e6, rel=1e-3)
    assert frequency(CFG.with_current(1.5e-6).with_topology(T.Conventional8T)) == pytest.approx(69.75e6, rel=1e-3)


def test_ratios():
    assert frequency_ratio() == pytest.approx(1.1545, abs=1e-3)
    assert average_current_ratio() == pytest.approx(0.75 * 1.1545, abs=1e-3)
    assert tail_current_ratio_equal_frequency() == pytest.approx(0.8662, abs=1e-3)


@given(st.floats(1e-9, 1e-5), st.floats(1.01, 10))
def test_frequency_linear_in_current(i, k):
    assert frequency(CFG.with_current(i * k)) == pytest.approx(k * frequency(CFG.with_current(i)), rel=1e-9)


@given(st.floats(1e-9, 1e-5))
def test_ratio_independent_of_current(i):
    assert frequency_ratio(CFG.with_current(i)) == pytest.approx(frequency_ratio(), rel=1e-12)


@given(st.integers(3, 12))
def test_frequency_inverse_in_stage_count(n):
    f4 = frequency(CFG)
    assert frequency(RingConfig(n_stages=n)) == pytest.approx(f4 * 4 / n)


def test_knee_compresses_and_inverts():
    c = RingConfig(i_knee=3e-6)
    assert frequency(c.with_current(1.5e-6)) < frequency(CFG.with_current(1.5e-6))
    i = current_for_frequency(c, 40e6)
    assert frequency(c.with_current(i)) == pytest.approx(40e6, rel=1e-9)


def test_if_curve_validation():
    with pytest.raises(ValueError):
        if_curve(CFG, [0.0, 1e-6])
    with pytest.raises(ValueError):
        if_curve(CFG, [2e-6, 1e-6])
    curve = if_curve(CFG, [1e-7, 1e-6])
    assert curve[1][1] > curve[0][1]


def test_config_validation():
    with pytest.raises(ValueError):
        RingConfig(n_stages=2)
    with pytest.raises(ValueError):
        RingConfig(i_tail=0)
    with pytest.raises(ValueError):
        RingConfig(penalty=1.0)


def test_startup_variants():
    f = startup_variant_comparison(CFG, StartupCalibration())
    conv = f[T.Conventional8T]
    assert f[T.ProposedBothStartup] / conv == pytest.approx(1.11, abs=0.005)
    assert f[T.ProposedPmosStartup] / conv == pytest.approx(0.87, abs=0.005)
    assert f[T.ProposedNmosStartup] == f[T.ProposedPmosStartup]


def test_edge_stream_count():
    e = edge_stream(40e6, 50e-6)
    assert len(e) == 16000
    e.validate()
    assert e.frequency() == pytest.approx(40e6)
    assert e.phase_at(0.0) == 0
    assert e.phase_at(50e-6) == 0


@settings(max_examples=50)
@given(st.floats(1e6, 80e6), st.floats(1e-6, 20e-6), st.integers(0, 7), st.floats(0, 0.999))
def test_edge_stream_valid(f, dur, p0, off):
    e = edge_stream(f, dur, initial_phase=p0, offset=off)
    e.validate()
    assert np.all(e.times > 0) and np.all(e.times <= dur * (1 + 1e-9))
    assert abs(len(e) - 8 * f * dur) <= 1.0 + 1e-6


def test_edge_stream_with_periods():
    periods = np.full(10, 25e-9)
    e = edge_stream(40e6, 200e-9, periods=periods)
    e.validate()
    assert len(e) == 64


def test_edge_stream_validate_rejects_skips():
    e = EdgeStream(np.array([1.0, 2.0]), np.array([1, 3]))
    with pytest.raises(ValueError):
        e.validate()


def test_edge_csv_header():
    text = edge_stream(40e6, 100e-9).to_csv()
    assert text.splitlines()[0] == "time_s,stage,phase_deg"
    assert text.splitlines()[1].split(",")[2] == "45"
