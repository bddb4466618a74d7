"""Continuous-time node-voltage integration of the ring.

This is the cross-check for the phase-average frequency model: the same
alpha-power devices, soft rails at vmax/vmin, one lumped capacitance per
output node, fixed-step RK4.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .ring import EdgeStream, RingConfig, frequency
from .stage import StageTopology

NMOS, PMOS = 0, 1
# node references inside one stage
OUTP, OUTN, INP, INN = 0, 1, 2, 3

_COMMON = [
    ("MP1", PMOS, INP, OUTP),
    ("MN3", NMOS, OUTN, OUTP),
    ("MN2", NMOS, INN, OUTN),
    ("MP4", PMOS, OUTP, OUTN),
]
_MN1 = ("MN1", NMOS, INP, OUTP)
_MP2 = ("MP2", PMOS, INN, OUTN)

STAGE_DEVICES = {
    StageTopology.Proposed4T: _COMMON,
    StageTopology.ProposedPmosStartup: _COMMON + [_MP2],
    StageTopology.ProposedNmosStartup: _COMMON + [_MN1],
    StageTopology.ProposedBothStartup: _COMMON + [_MN1, _MP2],
    StageTopology.Conventional8T: _COMMON
    + [_MN1, _MP2, ("MP3", PMOS, OUTN, OUTP), ("MN4", NMOS, OUTP, OUTN)],
}


def ring_wiring(topo: StageTopology, n_stages: int) -> np.ndarray:
    """Device table (kind, gate node, drain node) over the flattened ring.

    Nodes 0..N-1 are outp of each stage, N..2N-1 are outn.  Stage k takes its
    inputs from stage k-1; for even N the last stage feeds the first with the
    differential pair swapped.
    """
    rows = []
    n = n_stages
    for k in range(n):
        outp, outn = k, n + k
        if k > 0:
            inp, inn = k - 1, n + k - 1
        elif n % 2 == 0:
            inp, inn = 2 * n - 1, n - 1
        else:
            inp, inn = n - 1, 2 * n - 1
        ref = {OUTP: outp, OUTN: outn, INP: inp, INN: inn}
        for _, kind, gate, drain in STAGE_DEVICES[topo]:
            rows.append((kind, ref[gate], ref[drain]))
    return np.array(rows, dtype=np.int64)


@numba.njit(cache=True)
def _ids(ov, vds, alpha):
    if ov <= 0.0 or vds <= 0.0:
        return 0.0
    if vds < ov:
        return ov ** (alpha / 2.0) * vds
    return 0.5 * ov**alpha


@numba.njit(cache=True)
def _rhs(v, wiring, vmax, vmin, vt, alpha, beta, cap, out):
    out[:] = 0.0
    for r in range(wiring.shape[0]):
        kind = wiring[r, 0]
        g = v[wiring[r, 1]]
        d = v[wiring[r, 2]]
        if kind == 1:
            out[wiring[r, 2]] += beta * _ids(vmax - g - vt, vmax - d, alpha)
        else:
            out[wiring[r, 2]] -= beta * _ids(g - vmin - vt, d - vmin, alpha)
    for j in range(v.shape[0]):
        out[j] /= cap


@numba.njit(cache=True)
def _integrate(v0, wiring, n, vmax, vmin, vt, alpha, beta, cap, dt, nsteps, max_edges):
    v = v0.copy()
    k1 = np.empty_like(v)
    k2 = np.empty_like(v)
    k3 = np.empty_like(v)
    k4 = np.empty_like(v)
    tmp = np.empty_like(v)
    times = np.empty(max_edges)
    stage = np.empty(max_edges, dtype=np.int64)
    rising = np.empty(max_edges, dtype=np.int64)
    ne = 0
    for s in range(nsteps):
        _rhs(v, wiring, vmax, vmin, vt, alpha, beta, cap, k1)
        for j in range(v.shape[0]):
            tmp[j] = v[j] + 0.5 * dt * k1[j]
        _rhs(tmp, wiring, vmax, vmin, vt, alpha, beta, cap, k2)
        for j in range(v.shape[0]):
            tmp[j] = v[j] + 0.5 * dt * k2[j]
        _rhs(tmp, wiring, vmax, vmin, vt, alpha, beta, cap, k3)
        for j in range(v.shape[0]):
            tmp[j] = v[j] + dt * k3[j]
        _rhs(tmp, wiring, vmax, vmin, vt, alpha, beta, cap, k4)
        for j in range(v.shape[0]):
            tmp[j] = v[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
        for k in range(n):
            d0 = v[k] - v[n + k]
            d1 = tmp[k] - tmp[n + k]
            if (d0 > 0.0) != (d1 > 0.0) and ne < max_edges:
                times[ne] = (s + d0 / (d0 - d1)) * dt
                stage[ne] = k
                rising[ne] = 1 if d1 > 0.0 else 0
                ne += 1
        for j in range(v.shape[0]):
            v[j] = tmp[j]
    return times[:ne], stage[:ne], rising[:ne], v


def uniform_state(cfg: RingConfig) -> np.ndarray:
    """Every stage holds outp = vmax, outn = vmin."""
    n = cfg.n_stages
    return np.concatenate([np.full(n, cfg.rails.vmax), np.full(n, cfg.rails.vmin)])


def crossing_phase(stage: np.ndarray, rising: np.ndarray, n_stages: int) -> np.ndarray:
    """Map a differential zero crossing of ``stage`` to its phase index in [0, 2N)."""
    first_half = rising == ((stage % 2) == 0)
    return np.where(first_half, stage, stage + n_stages)


@dataclass
class TransientResult:
    edges: EdgeStream
    locked: bool
    final_state: np.ndarray
    dt: float

    @property
    def frequency(self) -> float:
        return 0.0 if self.locked else self.edges.frequency()


def transient_oracle(
    cfg: RingConfig,
    duration: float | None = None,
    steps_per_period: int = 1000,
    initial_state: np.ndarray | None = None,
    periods: float = 30.0,
) -> TransientResult:
    """Integrate the ring and return its phase steps.

    The step is ``1 / (f_est * steps_per_period)`` with ``f_est`` the
    phase-average frequency; ``duration`` defaults to ``periods`` estimated
    periods.  A ring that produces fewer than one cycle of steps in the second
    half of the run is reported as locked.
    """
    f_est = frequency(cfg)
    if duration is None:
        duration = periods / f_est
    dt = 1.0 / (f_est * steps_per_period)
    nsteps = int(np.ceil(duration / dt))
    n = cfg.n_stages
    wiring = ring_wiring(cfg.topo, n)
    v0 = uniform_state(cfg) if initial_state is None else np.asarray(initial_state, dtype=float)
    if v0.shape != (2 * n,):
        raise ValueError(f"initial state must have {2 * n} node voltages")
    beta = cfg.device.beta * cfg.i_scale
    max_edges = int(2 * n * duration * f_est * 20) + 64
    times, stage, rising, v_end = _integrate(
        v0, wiring, n, cfg.rails.vmax, cfg.rails.vmin, cfg.device.vt, cfg.device.alpha,
        beta, cfg.c_load, dt, nsteps, max_edges,
    )
    phases = crossing_phase(stage, rising, n)
    # drop the start-up transient: keep the tail after the last out-of-sequence step
    if len(phases) > 1:
        bad = np.nonzero((np.diff(phases) % (2 * n)) != 1)[0]
        if len(bad):
            cut = bad[-1] + 1
            times, phases = times[cut:], phases[cut:]
    late = np.count_nonzero(times > duration / 2)
    locked = late < 2 * n
    initial = int((phases[0] - 1) % (2 * n)) if len(phases) else 0
    edges = EdgeStream(times, phases, n, duration, 0.0, initial)
    return TransientResult(edges, locked, v_end, dt)
