import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from ccosim.ring import RingConfig, frequency, if_curve
from ccosim.variation import (
    MismatchModel,
    SupplyPerturbation,
    curves_csv,
    mc_if_curves,
    reference_frequencies,
    sample_cv,
    sample_slope_scale,
    sample_supply_perturbation,
    truncated_normal,
)

CFG = RingConfig()
ZERO = MismatchModel(sigma_f_ref=0.0)


def test_cv_invariant():
    m = MismatchModel()
    assert m.cv == pytest.approx(1.8 / 39.7, abs=1e-12)
    with pytest.raises(ValueError):
        MismatchModel(cv=0.05)
    with pytest.raises(ValueError):
        MismatchModel(sigma1=-1)


def test_zero_sigma_gives_means():
    m1, m2 = sample_slope_scale(MismatchModel(sigma_f_ref=0.0, mu1=1.2, mu2=0.9), 5, 0)
    assert np.all(m1 == 1.2) and np.all(m2 == 0.9)


def test_determinism():
    a = sample_slope_scale(MismatchModel(), 10, 4)
    b = sample_slope_scale(MismatchModel(), 10, 4)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


@given(st.floats(-1, 1), st.floats(0.01, 2), st.integers(0, 1000))
def test_truncated_normal_non_negative(mu, sigma, seed):
    mu = max(mu, -sigma)  # keep enough positive mass
    assert np.all(truncated_normal(mu, sigma, 50, seed) >= 0)


def test_single_zero_sigma_run_is_nominal():
    currents = [1e-7, 5e-7, 1e-6]
    curves = mc_if_curves(CFG, ZERO, 1, currents, 0)
    nominal = [f for _, f in if_curve(CFG, currents)]
    assert np.array_equal(curves[0], nominal)


def test_mc_reference_point():
    f = reference_frequencies(CFG, MismatchModel(), 2000, 11)
    assert f.mean() == pytest.approx(39.7e6, rel=0.05)
    assert f.std(ddof=1) == pytest.approx(1.8e6, rel=0.05)
    assert abs(sample_cv(f) - MismatchModel().cv) <= 0.005
    assert stats.normaltest(f).pvalue > 0.01


def test_mean_curve_close_to_nominal():
    currents = np.linspace(0.1e-6, 1.5e-6, 8)
    curves = mc_if_curves(CFG, MismatchModel(), 2000, currents, 5)
    nominal = np.array([f for _, f in if_curve(CFG, currents)])
    assert np.all(np.abs(curves.mean(axis=0) / nominal - 1) < 0.01)


def test_reference_current():
    m = MismatchModel()
    assert frequency(CFG.with_current(m.reference_current(CFG))) == pytest.approx(39.7e6)


def test_common_scale_preserves_argmax():
    rng = np.random.default_rng(0)
    out = rng.random((20, 10))
    scale = 1 + sample_supply_perturbation(SupplyPerturbation(), 1) / 100
    assert np.array_equal(np.argmax(out, axis=1), np.argmax(out * scale, axis=1))


def test_supply_zero_std():
    assert sample_supply_perturbation(SupplyPerturbation(std_pct=0.0), 0) == -0.78


def test_supply_statistics():
    d = sample_supply_perturbation(SupplyPerturbation(), 2, size=100000)
    assert d.mean() == pytest.approx(-0.78, abs=0.02)
    assert d.min() >= -6.0 - 1e-12 and d.max() <= 4.44 + 1e-12


def test_supply_temperature_knob():
    p = SupplyPerturbation(std_pct=0.0, temp_coeff_pct_per_k=0.01, delta_t=10)
    assert sample_supply_perturbation(p, 0) == pytest.approx(-0.68)


def test_curves_csv():
    lines = curves_csv([1e-6], [[4e7], [4.1e7]]).splitlines()
    assert lines == ["run_id,current_a,freq_hz", "0,1.00000000e-06,4.00000000e+07", "1,1.00000000e-06,4.10000000e+07"]
