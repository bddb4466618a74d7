"""Monte-Carlo mismatch of I-F curves and supply perturbation draws."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .ring import RingConfig, current_for_frequency, frequency, if_curve

MEAN_F_REF = 39.7e6
SIGMA_F_REF = 1.8e6


def truncated_normal(mu: float, sigma: float, size, rng) -> np.ndarray:
    """Gaussian draws with negative values rejected and redrawn."""
    rng = np.random.default_rng(rng)
    shape = () if size is None else size
    out = rng.normal(mu, sigma, size=shape) if sigma > 0 else np.full(shape, float(mu))
    flat = np.asarray(out, dtype=float).reshape(-1)
    for _ in range(1000):
        bad = flat < 0
        if not bad.any():
            break
        flat[bad] = rng.normal(mu, sigma, size=int(bad.sum()))
    else:
        raise ValueError("slope distribution has almost no positive mass")
    return float(flat[0]) if size is None else flat.reshape(shape)


@dataclass(frozen=True)
class MismatchModel:
    """Per-instance slope scaling of the I-F curve.

    Region slopes are in units of the nominal slope.  By default both regions
    share one Gaussian whose spread equals the reference-point CV.
    """

    mean_f_ref: float = MEAN_F_REF
    sigma_f_ref: float = SIGMA_F_REF
    cv: float | None = None
    mu1: float = 1.0
    sigma1: float | None = None
    mu2: float = 1.0
    sigma2: float | None = None
    # current where region 2 starts; None applies region 1 everywhere
    boundary: float | None = None

    def __post_init__(self):
        if not (self.mean_f_ref > 0 and self.sigma_f_ref >= 0):
            raise ValueError("reference mean must be positive and sigma non-negative")
        cv = self.sigma_f_ref / self.mean_f_ref
        if self.cv is None:
            object.__setattr__(self, "cv", cv)
        elif abs(self.cv - cv) > 1e-6:
            raise ValueError(f"cv {self.cv} disagrees with sigma/mean {cv}")
        for name in ("sigma1", "sigma2"):
            if getattr(self, name) is None:
                object.__setattr__(self, name, self.cv)
            elif getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.mu1 <= 0 or self.mu2 <= 0:
            raise ValueError("slope means must be positive")

    def reference_current(self, cfg: RingConfig) -> float:
        """Nominal current that puts ``cfg`` at the reference frequency."""
        return current_for_frequency(cfg, self.mean_f_ref)


def sample_slope_scale(model, size, rng) -> tuple[np.ndarray, np.ndarray]:
    """Per-instance (m1, m2) draws from the two region distributions."""
    rng = np.random.default_rng(rng)
    m1 = truncated_normal(model.mu1, model.sigma1, size, rng)
    m2 = truncated_normal(model.mu2, model.sigma2, size, rng)
    return m1, m2


def scaled_curve(currents, freqs, m1, m2, boundary=None) -> np.ndarray:
    currents = np.asarray(currents, dtype=float)
    freqs = np.asarray(freqs, dtype=float)
    if boundary is None:
        return m1 * freqs
    return np.where(currents < boundary, m1, m2) * freqs


def mc_if_curves(cfg: RingConfig, model: MismatchModel, n_runs: int, currents, rng) -> np.ndarray:
    """``n_runs`` x len(currents) frequencies of slope-scaled rings."""
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    currents = np.asarray(currents, dtype=float)
    nominal = np.array([f for _, f in if_curve(cfg, currents)])
    m1, m2 = sample_slope_scale(model, n_runs, rng)
    return np.stack([scaled_curve(currents, nominal, a, b, model.boundary) for a, b in zip(m1, m2)])


def reference_frequencies(cfg: RingConfig, model: MismatchModel, n_runs: int, rng) -> np.ndarray:
    i_ref = model.reference_current(cfg)
    return mc_if_curves(cfg, model, n_runs, [i_ref], rng)[:, 0]


def curves_csv(currents, curves) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["run_id", "current_a", "freq_hz"])
    for run, row in enumerate(curves):
        for i, f in zip(currents, row):
            w.writerow([run, f"{i:.8e}", f"{f:.8e}"])
    return buf.getvalue()


@dataclass(frozen=True)
class SupplyPerturbation:
    """Relative neuron-output change (percent) under supply variation."""

    mean_pct: float = -0.78
    std_pct: float = 1.74
    vdd_range: tuple = field(default=(1.0, 1.2))
    # temperature knob, off by default
    temp_coeff_pct_per_k: float = 0.0
    delta_t: float = 0.0

    def __post_init__(self):
        if self.std_pct < 0:
            raise ValueError("std_pct must be non-negative")
        lo, hi = self.vdd_range
        if not 0 < lo <= hi:
            raise ValueError("vdd_range must be positive and ordered")

    @property
    def bounds(self) -> tuple[float, float]:
        return self.mean_pct - 3 * self.std_pct, self.mean_pct + 3 * self.std_pct


def sample_supply_perturbation(p: SupplyPerturbation, rng, size=None):
    """Percent perturbation draws, clamped to mean +- 3 sigma."""
    rng = np.random.default_rng(rng)
    lo, hi = p.bounds
    draw = np.clip(rng.normal(p.mean_pct, p.std_pct, size=size), lo, hi) if p.std_pct > 0 else np.full(size or (), p.mean_pct)
    draw = draw + p.temp_coeff_pct_per_k * p.delta_t
    return float(draw) if size is None else draw


def sample_cv(freqs) -> float:
    freqs = np.asarray(freqs, dtype=float)
    return float(freqs.std(ddof=1) / freqs.mean())


def nominal_reference(cfg: RingConfig, model: MismatchModel) -> float:
    return frequency(cfg.with_current(model.reference_current(cfg)))
