"""The oscillator as a neuron: rate readout, activation extraction, spiking."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, replace

import numpy as np

from .ring import RingConfig, edge_stream, frequency
from .tdc import COARSE_BITS, convert


def rate_response(
    i_in: float,
    window: float,
    cfg: RingConfig,
    width: int = COARSE_BITS,
    i_leak: float = 0.0,
) -> int:
    """Fine-step count (8 * cycles + phase) read by the TDC after ``window``."""
    if i_in < 0:
        raise ValueError("input current must be non-negative")
    drive = i_in - i_leak
    if drive <= 0:
        return 0
    f = frequency(cfg.with_current(drive))
    return convert(edge_stream(f, window, cfg.n_stages), window, width).fine_steps


# --- activation extraction ----------------------------------------------------


def _as_curves(curves) -> list[tuple[np.ndarray, np.ndarray]]:
    out = []
    for x, y in curves:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.shape != y.shape or x.ndim != 1:
            raise ValueError("each curve needs matching 1-D current and frequency arrays")
        if len(np.unique(x)) < 2:
            raise ValueError("degenerate curve: needs at least two distinct currents")
        out.append((x, y))
    if not out:
        raise ValueError("need at least one curve")
    return out


def _origin_slope(x, y) -> float:
    return float(np.dot(x, y) / np.dot(x, x))


def fit_mean_slope(curves) -> float:
    """Mean over curves of the least-squares slope through the origin."""
    return float(np.mean([_origin_slope(x, y) for x, y in _as_curves(curves)]))


def curve_slopes(curves) -> np.ndarray:
    return np.array([_origin_slope(x, y) for x, y in _as_curves(curves)])


def _spread(s: np.ndarray) -> float:
    # shifting by one sample keeps identical slopes at exactly zero spread
    return float(np.std(s - s[0]))


@dataclass(frozen=True)
class TwoRegionFit:
    boundary: float
    mu1: float
    sigma1: float
    mu2: float
    sigma2: float
    sse: float
    slopes1: np.ndarray
    slopes2: np.ndarray


def _region_sse(x, y):
    xx = np.dot(x, x)
    if xx == 0:
        return float(np.dot(y, y)), 0.0
    m = np.dot(x, y) / xx
    r = y - m * x
    return float(np.dot(r, r)), float(m)


def fit_two_region(curves, candidates=None, min_points: int = 3) -> TwoRegionFit:
    """Boundary and per-region slope distributions minimising total squared error.

    Region 1 is x < B, region 2 is x >= B, each fitted by a line through the
    origin on every curve.  Candidates default to the swept currents; ties in
    the error (to 1e-9 of the signal energy) go to the smallest boundary.
    """
    curves = _as_curves(curves)
    if candidates is None:
        candidates = np.unique(np.concatenate([x for x, _ in curves]))
    candidates = np.sort(np.asarray(candidates, dtype=float))
    energy = sum(float(np.dot(y, y)) for _, y in curves)
    best = None
    for b in candidates:
        if any(np.count_nonzero(x < b) < min_points or np.count_nonzero(x >= b) < min_points for x, _ in curves):
            continue
        sse = 0.0
        s1, s2 = [], []
        for x, y in curves:
            lo = x < b
            e1, m1 = _region_sse(x[lo], y[lo])
            e2, m2 = _region_sse(x[~lo], y[~lo])
            sse += e1 + e2
            s1.append(m1)
            s2.append(m2)
        if best is None or sse < best[1] - 1e-9 * energy:
            best = (b, sse, np.array(s1), np.array(s2))
    if best is None:
        raise ValueError(f"no candidate boundary leaves {min_points} points in both regions")
    b, sse, s1, s2 = best
    return TwoRegionFit(float(b), float(s1.mean()), _spread(s1), float(s2.mean()), _spread(s2), sse, s1, s2)


@dataclass(frozen=True)
class ActivationModel:
    """Two-region slope model with static mismatch and temporal jitter.

    ``jitter_sigma`` is relative (0.002 for 0.2 % count jitter).
    """

    mean_slope: float
    boundary: float
    mu1: float
    sigma1: float
    mu2: float
    sigma2: float
    jitter_sigma: float = 0.0

    def __post_init__(self):
        if not (self.mean_slope > 0 and self.mu1 > 0 and self.mu2 > 0):
            raise ValueError("slopes must be positive")
        if self.sigma1 < 0 or self.sigma2 < 0 or self.jitter_sigma < 0:
            raise ValueError("spreads must be non-negative")

    @classmethod
    def from_fit(cls, fit: TwoRegionFit, mean_slope: float, jitter_sigma: float = 0.0):
        return cls(mean_slope, fit.boundary, fit.mu1, fit.sigma1, fit.mu2, fit.sigma2, jitter_sigma)

    @classmethod
    def identity(cls, boundary: float = 1.0):
        return cls(1.0, boundary, 1.0, 0.0, 1.0, 0.0, 0.0)

    def normalised(self, x_scale: float | None = None) -> "ActivationModel":
        """Slopes divided by the mean slope, boundary divided by ``x_scale``.

        ``x_scale`` is the input current represented by a pre-activation of 1;
        it defaults to the boundary itself, which lands the kink at x = 1.
        """
        x_scale = self.boundary if x_scale is None else x_scale
        k = self.mean_slope
        return ActivationModel(
            1.0, self.boundary / x_scale, self.mu1 / k, self.sigma1 / k, self.mu2 / k, self.sigma2 / k, self.jitter_sigma
        )

    def with_jitter(self, sigma: float) -> "ActivationModel":
        return replace(self, jitter_sigma=sigma)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ActivationModel":
        d = json.loads(text)
        keys = {"mean_slope", "boundary", "mu1", "sigma1", "mu2", "sigma2", "jitter_sigma"}
        if set(d) != keys:
            raise ValueError(f"activation JSON keys must be exactly {sorted(keys)}")
        return cls(**{k: float(v) for k, v in d.items()})


def custom_activation(x, boundary: float, m1, m2, noise=None, clamp: bool = False):
    """ReLU(u) + u * n with u = m1 x below the boundary and m2 x above it.

    ``m1``/``m2`` are per-neuron static slopes, ``noise`` a fresh draw per
    evaluation (None means noiseless).  Outputs can go negative when n < -1
    unless ``clamp`` is set.
    """
    x = np.asarray(x, dtype=float)
    u = np.where(x < boundary, m1 * x, m2 * x)
    out = np.maximum(u, 0.0)
    if noise is not None:
        out = out + u * noise
    if clamp:
        out = np.maximum(out, 0.0)
    return out


def custom_activation_grad(x, boundary: float, m1, m2):
    """Derivative of the noiseless piecewise-linear part."""
    x = np.asarray(x, dtype=float)
    slope = np.where(x < boundary, m1, m2) * np.ones_like(x)
    return np.where(slope * x > 0, slope, 0.0)


# --- spiking mode ---------------------------------------------------------------


def cycle_charge(cfg: RingConfig) -> float:
    """Tail charge consumed per oscillation cycle (I / f)."""
    return cfg.i_tail / frequency(cfg)


@dataclass(frozen=True)
class SpikingConfig:
    i_leak: float = 1e-9
    # mirror integration capacitance, only used to report voltage steps
    c_int: float = 1e-12
    # charge per input pulse; None derives a quarter of the cycle charge
    pulse_charge: float | None = None
    spike_phase: int = 0
    pulses_per_spike: int = 4

    def __post_init__(self):
        if self.i_leak < 0:
            raise ValueError("i_leak must be non-negative")
        if self.c_int <= 0:
            raise ValueError("c_int must be positive")
        if not 0 <= self.spike_phase < 8:
            raise ValueError("spike_phase must be one of the 8 phases")
        if self.pulses_per_spike < 1:
            raise ValueError("pulses_per_spike must be >= 1")

    def resolved_pulse_charge(self, cfg: RingConfig) -> float:
        if self.pulse_charge is not None:
            return self.pulse_charge
        return cycle_charge(cfg) / self.pulses_per_spike

    def pulse_width(self, cfg: RingConfig, amplitude: float) -> float:
        """Width that delivers the pulse charge above the leak."""
        if amplitude <= self.i_leak:
            raise ValueError("pulse amplitude must exceed the leak current")
        return self.resolved_pulse_charge(cfg) / (amplitude - self.i_leak)

    def voltage_step(self, cfg: RingConfig) -> float:
        return self.resolved_pulse_charge(cfg) / self.c_int


def _cycles_per_coulomb(cfg: RingConfig) -> float:
    return frequency(cfg) / cfg.effective_current()


def spiking_response(t_edges, currents, scfg: SpikingConfig, cfg: RingConfig) -> np.ndarray:
    """Spike times for a piecewise-constant input current.

    ``currents[k]`` flows on [t_edges[k], t_edges[k + 1]).  The ring phase
    advances at f(max(0, i - i_leak)) and a spike is emitted each time it
    crosses ``spike_phase``; the ring starts at phase 0.
    """
    t = np.asarray(t_edges, dtype=float)
    i = np.asarray(currents, dtype=float)
    if t.ndim != 1 or len(t) != len(i) + 1:
        raise ValueError("need one more time edge than current samples")
    if np.any(np.diff(t) <= 0):
        raise ValueError("time edges must be strictly increasing")
    drive = np.maximum(i - scfg.i_leak, 0.0)
    if cfg.i_knee is not None:
        drive = drive / (1.0 + drive / cfg.i_knee)
    rate = _cycles_per_coulomb(cfg) * drive
    phase = np.concatenate([[0.0], np.cumsum(rate * np.diff(t))])
    offset = scfg.spike_phase / 8.0 if scfg.spike_phase else 1.0
    # crossings of offset + k cycles, with slack for exact charge balance
    targets = np.arange(offset, phase[-1] + 1e-9, 1.0)
    k = np.searchsorted(phase, targets - 1e-9, side="left")
    k = np.clip(k, 1, len(t) - 1)
    seg = k - 1
    dt = np.diff(t)[seg]
    frac = np.clip((targets - phase[seg]) / np.where(rate[seg] > 0, rate[seg], np.inf), 0.0, dt)
    return t[seg] + frac


def step_input(i_amp: float, t_on: float, t_off: float, t_end: float):
    if not 0 <= t_on < t_off <= t_end:
        raise ValueError("need 0 <= t_on < t_off <= t_end")
    edges = [0.0, t_on, t_off, t_end] if t_on > 0 else [0.0, t_off, t_end]
    vals = [0.0, i_amp, 0.0] if t_on > 0 else [i_amp, 0.0]
    if t_off == t_end:
        edges, vals = edges[:-1], vals[:-1]
    return np.array(edges), np.array(vals)


def pulse_train(times, amplitude: float, width: float, t_end: float):
    """Rectangular pulses of ``amplitude`` starting at ``times``."""
    times = np.sort(np.asarray(times, dtype=float))
    if np.any(np.diff(times) < width):
        raise ValueError("pulses overlap")
    edges, vals = [0.0], []
    for t0 in times:
        if t0 + width > t_end:
            raise ValueError("pulse runs past t_end")
        if t0 > edges[-1]:
            vals.append(0.0)
            edges.append(t0)
        vals.append(amplitude)
        edges.append(t0 + width)
    if t_end > edges[-1]:
        vals.append(0.0)
        edges.append(t_end)
    return np.array(edges), np.array(vals)


# --- extraction from Monte-Carlo I-F curves ------------------------------------

EXTRACTION_KNEE = 3e-6


def extraction_currents(lo: float = 0.05e-6, hi: float = 1.5e-6, n: int = 30) -> np.ndarray:
    return np.linspace(lo, hi, n)


def extract_activation(
    cfg: RingConfig,
    mismatch,
    currents,
    n_runs: int,
    rng,
    jitter_sigma: float = 0.0,
) -> tuple[ActivationModel, TwoRegionFit]:
    """Fit the two-region activation to ``n_runs`` mismatched I-F curves."""
    from .variation import mc_if_curves

    currents = np.asarray(currents, dtype=float)
    curves = mc_if_curves(cfg, mismatch, n_runs, currents, rng)
    pairs = [(currents, row) for row in curves]
    fit = fit_two_region(pairs)
    return ActivationModel.from_fit(fit, fit_mean_slope(pairs), jitter_sigma), fit
