"""Delay-stage topologies, load capacitance and the four-phase delay engine."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class StageTopology(enum.Enum):
    Conventional8T = "conventional8t"
    Proposed4T = "proposed4t"
    ProposedPmosStartup = "proposed_pmos_startup"
    ProposedNmosStartup = "proposed_nmos_startup"
    ProposedBothStartup = "proposed_both_startup"

    @property
    def is_proposed(self) -> bool:
        return self is not StageTopology.Conventional8T

    @classmethod
    def parse(cls, value: "str | StageTopology") -> "StageTopology":
        if isinstance(value, cls):
            return value
        for member in cls:
            if value in (member.value, member.name):
                return member
        raise ValueError(f"unknown topology {value!r}")


SINGLE_STARTUP = (StageTopology.ProposedPmosStartup, StageTopology.ProposedNmosStartup)


@dataclass(frozen=True)
class StageCaps:
    """Per-device gate-drain and gate-source capacitance (F)."""

    cgd: float = 0.28e-15
    cgs: float = 0.56e-15

    def __post_init__(self):
        if not (self.cgd > 0 and self.cgs > 0):
            raise ValueError("capacitances must be positive")

    @property
    def cg(self) -> float:
        return self.cgd + self.cgs

    def scaled(self, k: float) -> "StageCaps":
        return StageCaps(self.cgd * k, self.cgs * k)


@dataclass(frozen=True)
class Rails:
    """Soft-rail voltages and the four charging-phase increments."""

    vmax: float = 0.9
    vmin: float = 0.3
    vcm: float = 0.6
    dv: tuple[float, float, float, float] = (0.05, 0.25, 0.25, 0.05)

    def __post_init__(self):
        object.__setattr__(self, "dv", tuple(float(x) for x in self.dv))
        if not self.vmin < self.vcm < self.vmax:
            raise ValueError("rails must satisfy vmin < vcm < vmax")
        if len(self.dv) != 4 or any(x <= 0 for x in self.dv):
            raise ValueError("dv must hold four positive increments")
        if abs(sum(self.dv) - (self.vmax - self.vmin)) > 1e-9:
            raise ValueError(
                f"phase increments sum to {sum(self.dv)}, expected vmax - vmin = {self.vmax - self.vmin}"
            )

    @property
    def swing(self) -> float:
        return self.vmax - self.vmin


# Average charging-node currents in units of beta, phases A..D.
PHASE_CURRENTS = {
    "MP1": (0.02, 0.07, 0.07, 0.02),
    "MP3": (0.0, 0.0, 0.02, 0.02),
    "MN3": (0.01, 0.01, 0.0, 0.0),
}

PHASES = ("A", "B", "C", "D")


@dataclass(frozen=True)
class PhaseLedger:
    topology: StageTopology
    devices: dict = field(default_factory=dict)
    pull_up: tuple[str, ...] = ()
    pull_down: tuple[str, ...] = ()

    @property
    def composed(self) -> tuple[float, float, float, float]:
        """Net charging current per phase, in units of beta."""
        out = []
        for i in range(4):
            up = sum(self.devices[d][i] for d in self.pull_up)
            down = sum(self.devices[d][i] for d in self.pull_down)
            out.append(up - down)
        return tuple(out)

    def rule(self) -> str:
        return " + ".join(self.pull_up) + "".join(f" - {d}" for d in self.pull_down)


def load_capacitance(topo: StageTopology, caps: StageCaps) -> float:
    """Load capacitance of one output node.

    Conventional: 8 Cgd + 4 Cgs.  Startup-equipped proposed cell: 6 Cgd + 3 Cgs.
    A single startup device loads only one output; that node carries one Cgd
    more than the bare cell.  The bare 4T cell is 5 Cgd + 3 Cgs.
    """
    topo = StageTopology.parse(topo)
    if topo is StageTopology.Conventional8T:
        return 8 * caps.cgd + 4 * caps.cgs
    if topo is StageTopology.ProposedBothStartup:
        return 6 * caps.cgd + 3 * caps.cgs
    if topo in SINGLE_STARTUP:
        return 7 * caps.cgd + 3 * caps.cgs
    return 5 * caps.cgd + 3 * caps.cgs


def phase_currents(topo: StageTopology) -> PhaseLedger:
    topo = StageTopology.parse(topo)
    if topo is StageTopology.Conventional8T:
        return PhaseLedger(topo, dict(PHASE_CURRENTS), ("MP1", "MP3"), ("MN3",))
    devices = {k: PHASE_CURRENTS[k] for k in ("MP1", "MN3")}
    return PhaseLedger(topo, devices, ("MP1",), ("MN3",))


class DegenerateCurrentError(ValueError):
    pass


def stage_delay(
    topo: StageTopology,
    caps: StageCaps,
    rails: Rails,
    i_scale: float,
    penalty: float = 0.0,
) -> float:
    """Propagation delay summed over the four charging phases.

    ``i_scale`` converts the beta-normalised phase currents to amperes.
    ``penalty`` derates every phase current by (1 - penalty) and models
    contention losses that the phase table does not capture.
    """
    c_load = load_capacitance(topo, caps)
    currents = [c * i_scale * (1.0 - penalty) for c in phase_currents(topo).composed]
    if any(not i > 0 for i in currents):
        raise DegenerateCurrentError(f"non-positive phase current in {currents}")
    return sum(c_load * dv / i for dv, i in zip(rails.dv, currents))


def delay_ratio(caps: StageCaps | None = None, rails: Rails | None = None) -> float:
    """t_d(proposed with both startup devices) / t_d(conventional) at equal drive."""
    caps = caps or StageCaps()
    rails = rails or Rails()
    prop = stage_delay(StageTopology.ProposedBothStartup, caps, rails, 1.0)
    conv = stage_delay(StageTopology.Conventional8T, caps, rails, 1.0)
    return prop / conv
