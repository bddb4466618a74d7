import numpy as np
import pytest
from dataclasses import replace
from hypothesis import given
from hypothesis import strategies as st

from ccosim.jitter import (
    K_BOLTZMANN,
    JitterParams,
    calibrate_gamma,
    calibrated_params,
    counts_csv,
    f0_estimate,
    jitter_params_for,
    jitter_ratio_prediction,
    period_jitter_variance,
    sample_periods,
    window_count_jitter,
    window_counts,
)
from ccosim.ring import RingConfig, frequency

BASE = JitterParams(i_avg=1e-6, f0=20e6, c_load=10e-15)
pos = st.floats(0.1, 10)


def test_f0_example():
    assert f0_estimate(1e-6, 10e-15, 4, 1.2) == pytest.approx(20.833e6, rel=1e-4)


def test_zero_noise_factors():
    p = replace(BASE, gamma_n=0.0, gamma_p=0.0)
    assert period_jitter_variance(p) == pytest.approx(2 * K_BOLTZMANN * 300 / (1e-6 * 20e6 * 1.2))


def test_doubling_current_halves_variance():
    assert period_jitter_variance(replace(BASE, i_avg=2e-6)) == pytest.approx(period_jitter_variance(BASE) / 2)


def _var_ci(c, i):
    return period_jitter_variance(replace(BASE, i_avg=i, c_load=c, f0=f0_estimate(i, c, 4, 1.2)))


def test_c_over_i_squared():
    v = _var_ci(10e-15, 1e-6)
    assert _var_ci(10e-15, 0.5e-6) == pytest.approx(4 * v)
    assert _var_ci(20e-15, 1e-6) == pytest.approx(2 * v)


@given(pos, pos)
def test_c_over_i_squared_property(kc, ki):
    v = _var_ci(10e-15, 1e-6)
    assert _var_ci(10e-15 * kc, 1e-6 * ki) == pytest.approx(v * kc / ki**2, rel=1e-9)


@given(st.sampled_from(["i_avg", "f0", "vdd"]), st.floats(1.01, 5))
def test_decreasing_in(name, k):
    p = replace(BASE, **{name: getattr(BASE, name) * k})
    assert period_jitter_variance(p) < period_jitter_variance(BASE)


@given(st.sampled_from(["temperature", "gamma_n", "gamma_p"]), st.floats(1.01, 5))
def test_increasing_in(name, k):
    p = replace(BASE, **{name: getattr(BASE, name) * k})
    assert period_jitter_variance(p) > period_jitter_variance(BASE)


def test_ratio_prediction():
    assert jitter_ratio_prediction(0.75, 0.867) == pytest.approx(0.998, abs=1e-3)
    assert jitter_ratio_prediction(1, 1) == 1
    assert jitter_ratio_prediction(0.75, 1) == 0.75
    with pytest.raises(ValueError):
        jitter_ratio_prediction(0, 1)


def test_params_validation():
    with pytest.raises(ValueError):
        replace(BASE, vdd=0.2)
    with pytest.raises(ValueError):
        replace(BASE, i_avg=0)


def test_sample_periods():
    cfg = RingConfig()
    p = jitter_params_for(cfg, gamma=1e3)
    a = sample_periods(cfg, p, 100000, 1)
    assert np.array_equal(a, sample_periods(cfg, p, 100000, 1))
    sem = np.sqrt(period_jitter_variance(p) / len(a))
    assert abs(a.mean() - 1 / frequency(cfg)) < 5 * sem
    assert a.var() == pytest.approx(period_jitter_variance(p), rel=0.03)
    with pytest.raises(ValueError):
        sample_periods(cfg, p, 0, 1)


def test_zero_variance_counts_are_constant():
    cfg = RingConfig()
    assert window_count_jitter(cfg, None, trials=50, rng=0) == 0.0
    c = window_counts(cfg, None, trials=3)
    assert c[0] == int(8 * frequency(cfg) * 50e-6)


def test_calibrated_low_current_point():
    cfg = RingConfig(i_tail=0.2e-6)
    g = calibrate_gamma(cfg)
    pct = window_count_jitter(cfg, calibrated_params(cfg, g), trials=2000, rng=3)
    assert pct == pytest.approx(0.20, abs=0.05)


def test_count_std_grows_like_sqrt_window():
    cfg = RingConfig(i_tail=0.2e-6)
    p = calibrated_params(cfg, calibrate_gamma(cfg))
    s1 = window_counts(cfg, p, 12.5e-6, 3000, 1).std()
    s2 = window_counts(cfg, p, 50e-6, 3000, 2).std()
    assert s2 / s1 == pytest.approx(2.0, rel=0.1)


def test_counts_csv():
    lines = counts_csv([5, 6], 50e-6).splitlines()
    assert lines[0] == "trial,count,window_s"
    assert lines[2] == "1,6,5.00000000e-05"
