"""Thermal period jitter and windowed-count jitter statistics."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace

import numpy as np

from .ring import RingConfig, frequency

K_BOLTZMANN = 1.380649e-23

# calibration point for absolute jitter: low input current, 50 us window
LOW_CURRENT_POINT = 0.2e-6
LOW_CURRENT_TARGET_PCT = 0.20
MEASUREMENT_WINDOW = 50e-6


@dataclass(frozen=True)
class JitterParams:
    i_avg: float
    f0: float
    c_load: float
    n_stages: int = 4
    vdd: float = 1.2
    vt: float = 0.3
    gamma_n: float = 2.0 / 3.0
    gamma_p: float = 2.0 / 3.0
    temperature: float = 300.0
    k_boltzmann: float = K_BOLTZMANN

    def __post_init__(self):
        for name in ("i_avg", "f0", "c_load", "n_stages", "vdd", "vt", "temperature", "k_boltzmann"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.gamma_n < 0 or self.gamma_p < 0:
            raise ValueError("noise factors must be non-negative")
        if not self.vdd > self.vt:
            raise ValueError("vdd must exceed vt")


def f0_estimate(i: float, c: float, n: int, vdd: float) -> float:
    return (i / c) / (n * vdd)


def period_jitter_variance(p: JitterParams) -> float:
    """Variance of one oscillation period (s^2)."""
    kt = p.k_boltzmann * p.temperature
    shape = 2.0 / (p.vdd - p.vt) * (p.gamma_n + p.gamma_p) + 2.0 / p.vdd
    return kt / (p.i_avg * p.f0) * shape


def jitter_ratio_prediction(c_ratio: float, i_ratio: float) -> float:
    """Period-variance ratio of two rings from their load and current ratios."""
    if c_ratio <= 0 or i_ratio <= 0:
        raise ValueError("ratios must be positive")
    return c_ratio / i_ratio**2


def jitter_params_for(cfg: RingConfig, gamma: float = 2.0 / 3.0, vdd: float = 1.2, temperature: float = 300.0) -> JitterParams:
    """Jitter parameters of a ring, with f0 from the I/C estimate."""
    i = cfg.i_tail
    c = cfg.c_load
    return JitterParams(
        i_avg=i,
        f0=f0_estimate(i, c, cfg.n_stages, vdd),
        c_load=c,
        n_stages=cfg.n_stages,
        vdd=vdd,
        vt=cfg.device.vt,
        gamma_n=gamma,
        gamma_p=gamma,
        temperature=temperature,
    )


def calibrate_gamma(
    cfg: RingConfig,
    target_pct: float = LOW_CURRENT_TARGET_PCT,
    window: float = MEASUREMENT_WINDOW,
    vdd: float = 1.2,
    temperature: float = 300.0,
) -> float:
    """Noise factor (gamma_n = gamma_p) giving ``target_pct`` count jitter.

    Independent periods give a relative count spread of sqrt(var * f / window).
    The thermal expression is far below measured counter spread, so the
    returned factor absorbs all excess noise and is not a device property.
    """
    p = jitter_params_for(cfg, 1.0, vdd, temperature)
    var = (target_pct / 100.0) ** 2 * window / frequency(cfg)
    kt = p.k_boltzmann * p.temperature
    gamma = (var * p.i_avg * p.f0 / kt - 2.0 / vdd) * (vdd - p.vt) / 4.0
    if gamma < 0:
        raise ValueError("target jitter is below the supply-noise floor of the model")
    return gamma


def sample_periods(cfg: RingConfig, p: JitterParams, count: int, rng) -> np.ndarray:
    """Independent Gaussian periods with mean 1/f and the thermal variance."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(rng)
    mean = 1.0 / frequency(cfg)
    sigma = float(np.sqrt(period_jitter_variance(p)))
    if sigma == 0:
        return np.full(count, mean)
    return rng.normal(mean, sigma, size=count)


def window_counts(
    cfg: RingConfig,
    p: JitterParams | None,
    window: float = MEASUREMENT_WINDOW,
    trials: int = 1000,
    rng=None,
    steps_per_cycle: int = 8,
    random_phase: bool = False,
) -> np.ndarray:
    """Fine-step counts (cycles * steps_per_cycle + phase) seen in each window.

    Each trial draws independent periods until the window closes.  The window
    opens on an oscillator edge unless ``random_phase`` is set, in which case
    it opens at a uniformly random point of the first period and the count
    picks up quantisation spread on top of the jitter.
    """
    rng = np.random.default_rng(rng)
    mean = 1.0 / frequency(cfg)
    sigma = 0.0 if p is None else float(np.sqrt(period_jitter_variance(p)))
    n_mean = window / mean
    n_draw = int(np.ceil(n_mean + 8 * np.sqrt(n_mean) * sigma / mean + 8))
    counts = np.empty(trials, dtype=np.int64)
    chunk = max(1, int(4e6 // n_draw))
    for lo in range(0, trials, chunk):
        hi = min(trials, lo + chunk)
        m = hi - lo
        periods = mean + sigma * rng.standard_normal((m, n_draw)) if sigma else np.full((m, n_draw), mean)
        elapsed = rng.random(m) * periods[:, 0] if random_phase else np.zeros(m)
        counts[lo:hi] = _fine_position(periods, elapsed + window, steps_per_cycle) - _fine_position(
            periods, elapsed, steps_per_cycle
        )
    return counts


def _fine_position(periods: np.ndarray, t: np.ndarray, steps: int) -> np.ndarray:
    """Phase steps completed by time ``t`` of each row's period sequence."""
    ends = np.cumsum(periods, axis=1)
    full = (ends <= t[:, None] * (1 + 1e-12)).sum(axis=1)
    rows = np.arange(len(t))
    begun = np.where(full > 0, ends[rows, np.maximum(full - 1, 0)], 0.0)
    frac = (t - begun) / periods[rows, full]
    fine = np.minimum(np.floor(frac * steps + 1e-9).astype(np.int64), steps - 1)
    return full * steps + fine


def window_count_jitter(
    cfg: RingConfig,
    p: JitterParams | None,
    window: float = MEASUREMENT_WINDOW,
    trials: int = 1000,
    rng=None,
    random_phase: bool = False,
) -> float:
    """Spread of the windowed count in percent (std / mean * 100)."""
    counts = window_counts(cfg, p, window, trials, rng, random_phase=random_phase)
    mean = counts.mean()
    return 0.0 if mean == 0 else float(100.0 * counts.std(ddof=1) / mean)


def counts_csv(counts, window: float) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["trial", "count", "window_s"])
    for k, c in enumerate(counts):
        w.writerow([k, int(c), f"{window:.8e}"])
    return buf.getvalue()


def calibrated_params(cfg: RingConfig, gamma: float) -> JitterParams:
    return replace(jitter_params_for(cfg), gamma_n=gamma, gamma_p=gamma)
