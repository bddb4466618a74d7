"""N-stage ring assembly: frequency, I-F curves and edge streams."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from .device import DeviceParams
from .stage import (
    SINGLE_STARTUP,
    Rails,
    StageCaps,
    StageTopology,
    load_capacitance,
    phase_currents,
    stage_delay,
)


def tail_coefficient(rails: Rails) -> float:
    """Beta-normalised average charging current of the conventional cell.

    Tail current maps to drive as ``i_scale = i_tail / tail_coefficient``, so
    the conventional ring obeys f = I_ss / (2 N C_L V_sw) exactly and every
    other topology is measured against that.
    """
    composed = phase_currents(StageTopology.Conventional8T).composed
    return rails.swing / sum(dv / c for dv, c in zip(rails.dv, composed))


@dataclass(frozen=True)
class RingConfig:
    n_stages: int = 4
    topo: StageTopology = StageTopology.ProposedBothStartup
    caps: StageCaps = field(default_factory=StageCaps)
    rails: Rails = field(default_factory=Rails)
    i_tail: float = 1e-6
    v_swing: float | None = None
    device: DeviceParams = field(default_factory=DeviceParams)
    # tail source compression: i_eff = i / (1 + i / i_knee); None disables it
    i_knee: float | None = None
    penalty: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "topo", StageTopology.parse(self.topo))
        if self.n_stages < 3:
            raise ValueError("n_stages must be >= 3")
        if not self.i_tail > 0:
            raise ValueError("i_tail must be positive")
        if not 0 <= self.penalty < 1:
            raise ValueError("penalty must lie in [0, 1)")

    @property
    def swing(self) -> float:
        return self.rails.swing if self.v_swing is None else self.v_swing

    @property
    def c_load(self) -> float:
        return load_capacitance(self.topo, self.caps)

    def with_current(self, i_tail: float) -> "RingConfig":
        return replace(self, i_tail=i_tail)

    def with_topology(self, topo) -> "RingConfig":
        return replace(self, topo=StageTopology.parse(topo))

    def effective_current(self, i: float | None = None) -> float:
        i = self.i_tail if i is None else i
        if self.i_knee is None:
            return i
        return i / (1.0 + i / self.i_knee)

    @property
    def i_scale(self) -> float:
        """Amperes per unit of beta-normalised phase current."""
        return self.effective_current() / tail_coefficient(self.rails)


def lumped_frequency(i_ss: float, n_stages: int, c_load: float, v_swing: float) -> float:
    return i_ss / (2 * n_stages * c_load * v_swing)


def frequency(cfg: RingConfig) -> float:
    t_d = stage_delay(cfg.topo, cfg.caps, cfg.rails, cfg.i_scale, cfg.penalty)
    return 1.0 / (2 * cfg.n_stages * t_d)


def if_curve(cfg: RingConfig, currents) -> list[tuple[float, float]]:
    currents = [float(i) for i in currents]
    if any(i <= 0 for i in currents):
        raise ValueError("currents must be strictly positive")
    if any(b < a for a, b in zip(currents, currents[1:])):
        raise ValueError("currents must be sorted")
    return [(i, frequency(cfg.with_current(i))) for i in currents]


def frequency_ratio(cfg: RingConfig | None = None) -> float:
    """f(proposed, both startup) / f(conventional) at equal tail current."""
    cfg = cfg or RingConfig()
    prop = frequency(cfg.with_topology(StageTopology.ProposedBothStartup))
    conv = frequency(cfg.with_topology(StageTopology.Conventional8T))
    return prop / conv


def average_current(cfg: RingConfig) -> float:
    """Charge moved per cycle times frequency, 2 N C_L V_sw f."""
    return 2 * cfg.n_stages * cfg.c_load * cfg.swing * frequency(cfg)


def average_current_ratio(cfg: RingConfig | None = None) -> float:
    """I_prop / I_conv = (f_prop C_prop) / (f_conv C_conv) at equal tail current."""
    cfg = cfg or RingConfig()
    prop = cfg.with_topology(StageTopology.ProposedBothStartup)
    conv = cfg.with_topology(StageTopology.Conventional8T)
    return average_current(prop) / average_current(conv)


def current_for_frequency(cfg: RingConfig, f_target: float) -> float:
    """Tail current at which ``cfg`` oscillates at ``f_target``."""
    if cfg.i_knee is None:
        return cfg.i_tail * f_target / frequency(cfg)
    lo, hi = 1e-15, 1.0
    return brentq(lambda i: frequency(cfg.with_current(i)) - f_target, lo, hi, xtol=1e-18, rtol=1e-13)


def tail_current_ratio_equal_frequency(cfg: RingConfig | None = None, f_target: float = 40e6) -> float:
    cfg = cfg or RingConfig()
    i_prop = current_for_frequency(cfg.with_topology(StageTopology.ProposedBothStartup), f_target)
    i_conv = current_for_frequency(cfg.with_topology(StageTopology.Conventional8T), f_target)
    return i_prop / i_conv


@dataclass(frozen=True)
class StartupCalibration:
    """Contention penalties for the startup-variant comparison.

    Defaults put the both-device cell about 11 % above the conventional ring
    and single-device cells about 13 % below it.
    """

    both: float = 0.0385
    single: float = 0.184

    def penalty_for(self, topo: StageTopology) -> float:
        if topo is StageTopology.ProposedBothStartup:
            return self.both
        if topo in SINGLE_STARTUP:
            return self.single
        return 0.0


def startup_variant_comparison(cfg: RingConfig, calib: StartupCalibration | None = None) -> dict:
    calib = calib or StartupCalibration()
    topos = (
        StageTopology.Conventional8T,
        StageTopology.ProposedBothStartup,
        StageTopology.ProposedPmosStartup,
        StageTopology.ProposedNmosStartup,
    )
    return {
        t: frequency(replace(cfg, topo=t, penalty=calib.penalty_for(t))) for t in topos
    }


@dataclass
class EdgeStream:
    """Timestamped 180/N-degree phase steps of a ring.

    ``phases`` holds the phase index in [0, 2N) reached at each timestamp.
    """

    times: np.ndarray
    phases: np.ndarray
    n_stages: int = 4
    duration: float = 0.0
    start: float = 0.0
    initial_phase: int = 0

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.phases = np.asarray(self.phases, dtype=np.int64)

    @property
    def steps_per_cycle(self) -> int:
        return 2 * self.n_stages

    @property
    def stages(self) -> np.ndarray:
        return self.phases % self.n_stages

    @property
    def phase_deg(self) -> np.ndarray:
        return self.phases * (180.0 / self.n_stages)

    def __len__(self):
        return len(self.times)

    def validate(self) -> None:
        if len(self.times) and np.any(np.diff(self.times) <= 0):
            raise ValueError("edge timestamps must be strictly increasing")
        prev = np.concatenate([[self.initial_phase], self.phases[:-1]])
        if len(self.phases) and np.any((self.phases - prev) % self.steps_per_cycle != 1):
            raise ValueError("consecutive phases must differ by exactly one step")

    def phase_at(self, t: float) -> int:
        k = int(np.searchsorted(self.times, t, side="right"))
        return self.initial_phase if k == 0 else int(self.phases[k - 1])

    def frequency(self) -> float:
        """Mean frequency from the steady second half of the stream."""
        if len(self.times) < 4:
            return 0.0
        t = self.times[len(self.times) // 2 :]
        return 1.0 / (self.steps_per_cycle * float(np.mean(np.diff(t))))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time_s", "stage", "phase_deg"])
        for t, s, p in zip(self.times, self.stages, self.phase_deg):
            w.writerow([f"{t:.8e}", int(s), f"{p:g}"])
        return buf.getvalue()


def edge_stream(
    f: float,
    duration: float,
    n_stages: int = 4,
    start: float = 0.0,
    initial_phase: int = 0,
    offset: float = 0.0,
    periods=None,
) -> EdgeStream:
    """Phase steps of a ring running at ``f`` over [start, start + duration].

    With ``periods`` given, each cycle lasts the next sampled period and is split
    into 2N equal steps; otherwise cycles are uniform.  ``offset`` in [0, 1) is
    the fraction of the first step already elapsed at ``start``.
    """
    steps = 2 * n_stages
    if f <= 0 or duration <= 0:
        return EdgeStream(np.empty(0), np.empty(0, np.int64), n_stages, max(duration, 0.0), start, initial_phase)
    if periods is None:
        dt = 1.0 / (f * steps)
        # offset is the fraction of the first step already elapsed at ``start``
        n = int(np.floor(duration / dt + offset + 1e-9))
        times = start + (np.arange(n) + 1.0 - offset) * dt
    else:
        periods = np.asarray(periods, dtype=float)
        step_dt = np.repeat(periods / steps, steps)
        times = start - offset * step_dt[0] + np.cumsum(step_dt)
        times = times[times <= start + duration]
    phases = (initial_phase + 1 + np.arange(len(times))) % steps
    return EdgeStream(times, phases, n_stages, duration, start, initial_phase)
