"""Exhaustive search for non-oscillating states of the ring.

Each transistor is a switch: NMOS conducts with a high gate, PMOS with a low
gate.  A node goes high when only pull-up devices conduct, low when only
pull-down devices conduct, keeps its stored value when nothing conducts, and
becomes indeterminate when both directions conduct.  A fixed point is a state
that maps onto itself, so any contention excludes it: contention is resolved
by analog strength and cannot hold the ring still.
"""

from __future__ import annotations

from dataclasses import dataclass

from .stage import StageTopology
from .transient import INN, INP, NMOS, OUTN, OUTP, STAGE_DEVICES

UNKNOWN = -1


@dataclass(frozen=True)
class BooleanRingState:
    """outp/outn levels for every stage, packed as 2N bits.

    Bit k is outp of stage k, bit N + k is outn of stage k.
    """

    bits: int
    n_stages: int

    def __post_init__(self):
        if not 0 <= self.bits < 1 << (2 * self.n_stages):
            raise ValueError("state does not fit in 2N bits")

    def outp(self, k: int) -> int:
        return (self.bits >> k) & 1

    def outn(self, k: int) -> int:
        return (self.bits >> (self.n_stages + k)) & 1

    def stage_pairs(self) -> list[tuple[int, int]]:
        return [(self.outp(k), self.outn(k)) for k in range(self.n_stages)]

    def floating_nodes(self, topo: StageTopology) -> list[tuple[int, str]]:
        """(stage, node) pairs with no conducting device in this state."""
        out = []
        for k in range(self.n_stages):
            levels = _stage_levels(self, k)
            for node, name in ((OUTP, "outp"), (OUTN, "outn")):
                up, down = _drive(topo, levels, node)
                if not up and not down:
                    out.append((k, name))
        return out

    def __str__(self):
        return " ".join(f"{p}{n}" for p, n in self.stage_pairs())


def _stage_levels(state: BooleanRingState, k: int) -> dict:
    n = state.n_stages
    if k > 0:
        inp, inn = state.outp(k - 1), state.outn(k - 1)
    elif n % 2 == 0:
        inp, inn = state.outn(n - 1), state.outp(n - 1)
    else:
        inp, inn = state.outp(n - 1), state.outn(n - 1)
    return {OUTP: state.outp(k), OUTN: state.outn(k), INP: inp, INN: inn}


def _drive(topo: StageTopology, levels: dict, node: int) -> tuple[bool, bool]:
    up = down = False
    for _, kind, gate, drain in STAGE_DEVICES[topo]:
        if drain != node:
            continue
        if kind == NMOS and levels[gate] == 1:
            down = True
        elif kind != NMOS and levels[gate] == 0:
            up = True
    return up, down


def _resolve(up: bool, down: bool, prior: int) -> int:
    if up and down:
        return UNKNOWN
    if up:
        return 1
    if down:
        return 0
    return prior


def next_state(topo: StageTopology, state: BooleanRingState) -> list[int]:
    """Next level of every node, UNKNOWN where pull-up and pull-down fight.

    Returned in bit order (all outp, then all outn).
    """
    topo = StageTopology.parse(topo)
    n = state.n_stages
    outp, outn = [0] * n, [0] * n
    for k in range(n):
        levels = _stage_levels(state, k)
        outp[k] = _resolve(*_drive(topo, levels, OUTP), levels[OUTP])
        outn[k] = _resolve(*_drive(topo, levels, OUTN), levels[OUTN])
    return outp + outn


def is_fixed_point(topo: StageTopology, state: BooleanRingState) -> bool:
    nxt = next_state(topo, state)
    return all(v == (state.bits >> i) & 1 for i, v in enumerate(nxt))


def lock_state_analysis(topo: StageTopology, n_stages: int = 4) -> set[BooleanRingState]:
    if n_stages > 8:
        raise ValueError("exhaustive enumeration is limited to n_stages <= 8")
    topo = StageTopology.parse(topo)
    states = (BooleanRingState(b, n_stages) for b in range(1 << (2 * n_stages)))
    return {s for s in states if is_fixed_point(topo, s)}
