"""Alpha-power-law MOSFET drain current.

All voltages are source-referred magnitudes, so the same functions serve NMOS
(v_gs, v_ds) and PMOS (v_sg, v_sd) devices.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DeviceParams:
    """Alpha-power-law parameters shared by NMOS and PMOS devices.

    Attributes:
        beta: transconductance coefficient mu0*Cox*W/L (A/V^alpha).
        vt: threshold voltage magnitude (V), identical for N and P devices.
        alpha: velocity-saturation exponent.
        gamma: channel thermal-noise factor.
    """

    beta: float = 1.0
    vt: float = 0.3
    alpha: float = 1.3
    gamma: float = 2.0 / 3.0

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not self.vt > 0:
            raise ValueError(f"vt must be positive, got {self.vt}")
        if not 1.0 <= self.alpha <= 2.0:
            raise ValueError(f"alpha must lie in [1, 2], got {self.alpha}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")


class OperatingRegion(enum.IntEnum):
    CutOff = 0
    Linear = 1
    Saturation = 2


def classify_region(v_gs: float, v_ds: float, p: DeviceParams) -> OperatingRegion:
    # v_ds == v_gs - vt belongs to saturation
    if v_gs <= p.vt:
        return OperatingRegion.CutOff
    if v_ds < v_gs - p.vt:
        return OperatingRegion.Linear
    return OperatingRegion.Saturation


def drain_current(region: OperatingRegion, v_gs: float, v_ds: float, p: DeviceParams) -> float:
    """Drain current for an explicitly given operating region.

    Linear: beta * (v_gs - vt)^(alpha/2) * v_ds
    Saturation: beta/2 * (v_gs - vt)^alpha

    For alpha < 2 the two expressions do not meet at v_ds = v_gs - vt; the
    step is kept as is.
    """
    region = OperatingRegion(region)
    if region is OperatingRegion.CutOff:
        return 0.0
    overdrive = v_gs - p.vt
    if overdrive < 0:
        raise ValueError(
            f"v_gs={v_gs} is below threshold {p.vt} but region is {region.name}"
        )
    if region is OperatingRegion.Saturation:
        return 0.5 * p.beta * overdrive**p.alpha
    return p.beta * overdrive ** (p.alpha / 2) * v_ds


def ids(v_gs: float, v_ds: float, p: DeviceParams) -> float:
    """Classify and evaluate in one go. Reverse bias (v_ds < 0) gives zero."""
    if v_ds <= 0:
        return 0.0
    return drain_current(classify_region(v_gs, v_ds, p), v_gs, v_ds, p)


def ids_array(v_gs, v_ds, p: DeviceParams) -> np.ndarray:
    """Vectorised ``ids`` over numpy arrays."""
    v_gs = np.asarray(v_gs, dtype=float)
    v_ds = np.asarray(v_ds, dtype=float)
    ov = v_gs - p.vt
    on = (ov > 0) & (v_ds > 0)
    ov_on = np.where(on, ov, 0.0)
    lin = on & (v_ds < ov)
    sat = on & ~lin
    out = np.zeros(np.broadcast(v_gs, v_ds).shape)
    out = np.where(lin, p.beta * ov_on ** (p.alpha / 2) * np.maximum(v_ds, 0.0), out)
    out = np.where(sat, 0.5 * p.beta * ov_on**p.alpha, out)
    return out


def trajectory_average(
    region: OperatingRegion,
    v_gs: tuple[float, float],
    v_ds: tuple[float, float],
    p: DeviceParams,
    samples: int = 2001,
) -> float:
    """Mean current along a straight-line (v_gs, v_ds) sweep in a fixed region.

    Points that fall below threshold contribute zero, which is how a device
    that enters the sweep in cut-off behaves.
    """
    g = np.linspace(v_gs[0], v_gs[1], samples)
    d = np.linspace(v_ds[0], v_ds[1], samples)
    vals = np.array(
        [0.0 if gi <= p.vt else drain_current(region, gi, di, p) for gi, di in zip(g, d)]
    )
    # trapezoid mean over the normalised sweep parameter
    return float(np.sum((vals[1:] + vals[:-1]) / 2) / (samples - 1))
