"""Run configuration: one JSON document for every subcommand, strictly parsed."""

from __future__ import annotations

import dataclasses
import json
import types
import typing
from dataclasses import asdict, dataclass, field

from .device import DeviceParams
from .ring import RingConfig
from .stage import Rails, StageCaps, StageTopology

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Bad configuration; the message starts with the dotted key path."""


@dataclass
class RingSection:
    n_stages: int = 4
    topology: str = "proposed_both_startup"
    cgd: float = 0.28e-15
    cgs: float = 0.56e-15
    vmax: float = 0.9
    vmin: float = 0.3
    vcm: float = 0.6
    dv: tuple = (0.05, 0.25, 0.25, 0.05)
    i_tail: float = 1e-6
    v_swing: float | None = None
    beta: float = 1.0
    vt: float = 0.3
    alpha: float = 1.3
    i_knee: float | None = None

    def build(self, **overrides) -> RingConfig:
        d = {**asdict(self), **overrides}
        return RingConfig(
            n_stages=d["n_stages"],
            topo=StageTopology.parse(d["topology"]),
            caps=StageCaps(d["cgd"], d["cgs"]),
            rails=Rails(d["vmax"], d["vmin"], d["vcm"], tuple(d["dv"])),
            i_tail=d["i_tail"],
            v_swing=d["v_swing"],
            device=DeviceParams(beta=d["beta"], vt=d["vt"], alpha=d["alpha"]),
            i_knee=d["i_knee"],
        )


@dataclass
class SweepSection:
    i_min: float = 10e-9
    i_max: float = 1.5e-6
    points: int = 30
    log_spacing: bool = True
    topologies: tuple = ("conventional8t", "proposed_both_startup")
    # also integrate node voltages at every point (slow)
    oracle: bool = False


@dataclass
class JitterSection:
    window: float = 50e-6
    trials: int = 1000
    currents: tuple = (0.2e-6, 0.5e-6, 1.0e-6, 1.5e-6)
    calib_current: float = 0.2e-6
    target_pct: float = 0.20
    # None calibrates the noise factor at calib_current
    gamma: float | None = None
    vdd: float = 1.2
    temperature: float = 300.0


@dataclass
class TdcSection:
    width: int = 12
    window: float = 50e-6
    frequencies: tuple = (1e6, 10e6, 40e6, 80e6)
    aperture: float = 0.0


@dataclass
class LockSection:
    n_stages: int = 4
    topologies: tuple = (
        "proposed4t",
        "proposed_pmos_startup",
        "proposed_nmos_startup",
        "proposed_both_startup",
        "conventional8t",
    )


@dataclass
class McSection:
    n_runs: int = 2000
    mean_f_ref: float = 39.7e6
    sigma_f_ref: float = 1.8e6
    i_min: float = 0.05e-6
    i_max: float = 1.5e-6
    points: int = 30


@dataclass
class ActivationSection:
    i_knee: float = 3e-6
    i_min: float = 0.05e-6
    i_max: float = 1.5e-6
    points: int = 30
    n_runs: int = 2000
    jitter_pct: float = 0.20


@dataclass
class NnSection:
    dataset: str = "digits"
    hidden: tuple = (800, 300)
    epochs: int = 30
    batch_size: int = 32
    lr: float = 1e-3
    trials: int = 3
    resamples: int = 20
    # JSON written by extract-activation; None extracts with defaults
    activation_path: str | None = None


@dataclass
class SpikeSection:
    i_leak: float = 1e-9
    c_int: float = 1e-12
    spike_phase: int = 0
    dc_current: float = 0.5e-9
    step_current: float = 1e-6
    step_on: float = 1e-6
    step_off: float = 3e-6
    pulse_amplitude: float = 100e-9
    pulse_period: float = 200e-9
    n_pulses: int = 12
    t_end: float = 4e-6


@dataclass
class FomSection:
    power: float = 72e-6
    bandwidth: float = 500e3
    fom_target: float = 79e-15
    # None back-solves ENOB from fom_target
    enob: float | None = None
    vdd: float = 0.7
    branches: int = 8
    p_static: float = 0.3e-6
    i_min: float = 10e-9
    i_max: float = 1.5e-6
    points: int = 30


@dataclass
class ViSection:
    vdac: tuple = (0.1, 0.2, 0.5, 1.0)
    r_total: tuple = (1e6, 10e6)


@dataclass
class RunConfig:
    schema_version: int = SCHEMA_VERSION
    seed: int = 0
    ring: RingSection = field(default_factory=RingSection)
    sweep: SweepSection = field(default_factory=SweepSection)
    jitter: JitterSection = field(default_factory=JitterSection)
    tdc: TdcSection = field(default_factory=TdcSection)
    lockstate: LockSection = field(default_factory=LockSection)
    mc: McSection = field(default_factory=McSection)
    activation: ActivationSection = field(default_factory=ActivationSection)
    nn: NnSection = field(default_factory=NnSection)
    spike: SpikeSection = field(default_factory=SpikeSection)
    fom: FomSection = field(default_factory=FomSection)
    vi: ViSection = field(default_factory=ViSection)

    def to_dict(self) -> dict:
        return _plain(asdict(self))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _plain(v):
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


def _check_scalar(value, hint, path):
    """Coerce ``value`` to the annotated scalar type or raise with ``path``."""
    args = typing.get_args(hint)
    origin = typing.get_origin(hint)
    if origin in (typing.Union, types.UnionType):
        if value is None and type(None) in args:
            return None
        (inner,) = [a for a in args if a is not type(None)]
        return _check_scalar(value, inner, path)
    if hint is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{path}: expected true/false, got {value!r}")
        return value
    if hint is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return value
    if hint is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number, got {value!r}")
        return float(value)
    if hint is str:
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string, got {value!r}")
        return value
    if hint is tuple:
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{path}: expected a list, got {value!r}")
        return tuple(value)
    raise ConfigError(f"{path}: unsupported field type {hint!r}")


def _build(cls, data, path: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{path or '<root>'}: expected an object, got {type(data).__name__}")
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    for key in data:
        if key not in names:
            where = f"{path}.{key}" if path else key
            raise ConfigError(f"{where}: unknown key")
    kwargs = {}
    for name in names & set(data):
        where = f"{path}.{name}" if path else name
        hint = hints[name]
        if dataclasses.is_dataclass(hint):
            kwargs[name] = _build(hint, data[name], where)
        else:
            kwargs[name] = _check_scalar(data[name], hint, where)
    return cls(**kwargs)


def load_config(data: dict | None) -> RunConfig:
    cfg = _build(RunConfig, data or {}, "")
    if cfg.schema_version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version: expected {SCHEMA_VERSION}, got {cfg.schema_version}")
    if cfg.seed < 0 or cfg.seed >= 1 << 64:
        raise ConfigError("seed: must be an unsigned 64-bit integer")
    try:
        cfg.ring.build()
    except ValueError as exc:
        raise ConfigError(f"ring: {exc}") from None
    return cfg


def load_config_file(path) -> RunConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"<root>: invalid JSON ({exc})") from None
    return load_config(data)
