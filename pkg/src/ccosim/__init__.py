"""Behavioral simulator for a differential current-controlled ring oscillator neuron."""

from .device import DeviceParams, OperatingRegion
from .ring import RingConfig, frequency, if_curve
from .stage import Rails, StageCaps, StageTopology

__all__ = [
    "DeviceParams",
    "OperatingRegion",
    "Rails",
    "RingConfig",
    "StageCaps",
    "StageTopology",
    "frequency",
    "if_curve",
]
__version__ = "0.1.0"
