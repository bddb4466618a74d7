"""Converter figure of merit, energy per cycle and the V-I tuning map."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ring import RingConfig, current_for_frequency, frequency
from .stage import StageTopology

# ISEL selects the V-I resistor: low range 10 MOhm, high range 1 MOhm
R_TOTAL = {"low": 10e6, "high": 1e6}


@dataclass(frozen=True)
class FomInputs:
    power: float
    enob: float
    bandwidth: float

    def __post_init__(self):
        if not (self.power > 0 and self.bandwidth > 0):
            raise ValueError("power and bandwidth must be positive")
        if self.enob < 0:
            raise ValueError("enob must be non-negative")


def fom(inputs: FomInputs) -> float:
    """Energy per conversion step, P / (2^ENOB * 2 * BW)."""
    return inputs.power / (2.0**inputs.enob * 2.0 * inputs.bandwidth)


def enob_for_fom(power: float, bandwidth: float, fom_target: float) -> float:
    """ENOB that makes ``fom`` hit ``fom_target``."""
    return math.log2(power / (fom_target * 2.0 * bandwidth))


@dataclass(frozen=True)
class PowerModel:
    """Core power of the ring: each of ``branches`` tail sources draws I_tail.

    P = vdd * branches * I_tail + p_static.
    """

    vdd: float = 0.7
    branches: int = 8
    p_static: float = 0.3e-6

    def __post_init__(self):
        if self.vdd <= 0 or self.branches < 1 or self.p_static < 0:
            raise ValueError("invalid power model")

    def power(self, i_tail: float) -> float:
        return self.vdd * self.branches * i_tail + self.p_static


@dataclass(frozen=True)
class EnergyRow:
    current: float
    frequency: float
    power: float
    energy: float


def energy_per_cycle_report(cfg: RingConfig, currents, model: PowerModel | None = None) -> list[EnergyRow]:
    """P / f across the tuning range; rows with zero frequency are dropped."""
    model = model or PowerModel()
    rows = []
    for i in currents:
        f = frequency(cfg.with_current(float(i))) if i > 0 else 0.0
        if f <= 0:
            continue
        p = model.power(float(i))
        rows.append(EnergyRow(float(i), f, p, p / f))
    return rows


def energy_band(rows) -> tuple[float, float]:
    e = [r.energy for r in rows]
    return min(e), max(e)


def equal_frequency_power_gap(cfg: RingConfig, f_target: float = 40e6, model: PowerModel | None = None) -> float:
    """1 - P_proposed / P_conventional with both rings at ``f_target``."""
    model = model or PowerModel()
    i_p = current_for_frequency(cfg.with_topology(StageTopology.ProposedBothStartup), f_target)
    i_c = current_for_frequency(cfg.with_topology(StageTopology.Conventional8T), f_target)
    return 1.0 - model.power(i_p) / model.power(i_c)


def vi_map(vdac, r_total) -> np.ndarray | float:
    """Input current of the V-I converter, I = VDAC / R_total."""
    vdac = np.asarray(vdac, dtype=float)
    r_total = np.asarray(r_total, dtype=float)
    if np.any(r_total <= 0):
        raise ValueError("r_total must be positive")
    if np.any(vdac < 0):
        raise ValueError("vdac must be non-negative")
    out = vdac / r_total
    return float(out) if out.ndim == 0 else out


def tuning_range(r_total: float, vdac_lo: float = 0.1, vdac_hi: float = 1.0) -> tuple[float, float]:
    return vi_map(vdac_lo, r_total), vi_map(vdac_hi, r_total)
