"""Time-to-digital conversion: Gray coarse counter, phase-code fine counter, PISO."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .ring import EdgeStream

COARSE_BITS = 12
PHASE_BITS = 3
STEPS = 1 << PHASE_BITS

# four CCO phases 45 degrees apart; Johnson order, one bit changes per step
PHASE_SEQUENCE = ("0000", "0001", "0011", "0111", "1111", "1110", "1100", "1000")
_PHASE_INDEX = {code: k for k, code in enumerate(PHASE_SEQUENCE)}


class MetastableCapture(ValueError):
    """Sampled phase code is not one of the legal states."""


def gray_encode(n: int, width: int = COARSE_BITS) -> int:
    if not 0 <= n < 1 << width:
        raise OverflowError(f"{n} does not fit in {width} bits")
    return n ^ (n >> 1)


def gray_decode(g: int, width: int = COARSE_BITS) -> int:
    if not 0 <= g < 1 << width:
        raise OverflowError(f"{g} does not fit in {width} bits")
    n = 0
    while g:
        n ^= g
        g >>= 1
    return n


def phase_sequence() -> list[str]:
    return list(PHASE_SEQUENCE)


def phase_encode(sample: str) -> int:
    """Index 0..7 of a 4-bit phase sample, in temporal order."""
    sample = _as_code(sample)
    try:
        return _PHASE_INDEX[sample]
    except KeyError:
        raise MetastableCapture(f"illegal phase sample {sample}") from None


def resolve_phase(sample: str, hint: int | None = None) -> int:
    """Decode a sample, correcting a single corrupted bit.

    Illegal samples map to the nearest legal state by Hamming distance.  Ties
    go to the candidate reached first moving forward from ``hint`` (the last
    known phase), since the ring only advances; without a hint the lowest
    index wins.
    """
    sample = _as_code(sample)
    if sample in _PHASE_INDEX:
        return _PHASE_INDEX[sample]
    dist = [sum(a != b for a, b in zip(sample, code)) for code in PHASE_SEQUENCE]
    best = min(dist)
    cands = [k for k, d in enumerate(dist) if d == best]
    if hint is None:
        return cands[0]
    return min(cands, key=lambda k: (k - hint) % STEPS)


def _as_code(sample) -> str:
    if isinstance(sample, str):
        code = sample
    else:
        code = "".join(str(int(b)) for b in sample)
    if len(code) != 4 or set(code) - {"0", "1"}:
        raise ValueError(f"phase sample must be 4 binary levels, got {sample!r}")
    return code


@dataclass(frozen=True)
class TdcFrame:
    gc: int
    pc: int
    width: int = COARSE_BITS
    saturated: bool = False

    def __post_init__(self):
        if not 0 <= self.gc < 1 << self.width:
            raise ValueError("gc does not fit the coarse width")
        if not 0 <= self.pc < STEPS:
            raise ValueError("pc must lie in [0, 7]")

    @property
    def cycles(self) -> int:
        return gray_decode(self.gc, self.width)

    @property
    def fine_steps(self) -> int:
        return STEPS * self.cycles + self.pc

    @property
    def nbits(self) -> int:
        return self.width + PHASE_BITS

    def to_word(self) -> int:
        return (self.gc << PHASE_BITS) | self.pc

    @classmethod
    def from_word(cls, word: int, width: int = COARSE_BITS) -> "TdcFrame":
        if not 0 <= word < 1 << (width + PHASE_BITS):
            raise ValueError("word does not fit the frame width")
        return cls(word >> PHASE_BITS, word & (STEPS - 1), width)


def convert(
    edges: EdgeStream,
    window: float,
    width: int = COARSE_BITS,
    aperture: float = 0.0,
    rng=None,
) -> TdcFrame:
    """Sample the counters of ``edges`` after ``window`` seconds.

    The coarse counter is clocked each time the ring returns to phase 0; the
    fine code is the ring phase at window close.  Both counters start from the
    phase held at window open, so the total is that phase plus the steps seen.
    A nonzero ``aperture`` jitters the capture instant uniformly by up to that
    many seconds, which models a capture racing an edge (error of one step).
    """
    if edges.steps_per_cycle != STEPS:
        raise ValueError("phase code covers 8 steps per cycle (4 stages)")
    if window < 0:
        raise ValueError("window must be non-negative")
    t0 = edges.start
    close = t0 + window
    if aperture > 0 and window > 0:
        close += np.random.default_rng(rng).uniform(-aperture, aperture)
        close = max(close, t0)
    p0 = edges.initial_phase
    hit = edges.times[(edges.times > t0) & (edges.times <= close)]
    total = p0 + len(hit)
    pc = resolve_phase(PHASE_SEQUENCE[total % STEPS])
    cycles = total // STEPS
    saturated = cycles >= 1 << width
    if saturated:
        cycles = (1 << width) - 1
    return TdcFrame(gray_encode(cycles, width), pc, width, saturated)


def oracle_steps(edges: EdgeStream, window: float) -> int:
    """Phase steps strictly after window open and up to window close."""
    t0 = edges.start
    return int(np.count_nonzero((edges.times > t0) & (edges.times <= t0 + window)))


def decode_frequency(frame: TdcFrame, window: float) -> float:
    if not window > 0:
        raise ValueError("window must be positive")
    return frame.fine_steps / (STEPS * window)


def piso_serialize(frame: TdcFrame) -> list[int]:
    """Shift-out order: gc MSB first, then pc MSB first."""
    word = frame.to_word()
    return [(word >> k) & 1 for k in range(frame.nbits - 1, -1, -1)]


def piso_deserialize(bits, width: int = COARSE_BITS) -> TdcFrame:
    bits = [int(b) for b in bits]
    if len(bits) != width + PHASE_BITS:
        raise ValueError(f"expected {width + PHASE_BITS} bits, got {len(bits)}")
    if set(bits) - {0, 1}:
        raise ValueError("bits must be 0 or 1")
    word = 0
    for b in bits:
        word = (word << 1) | b
    return TdcFrame.from_word(word, width)


def dump_frames(frames) -> bytes:
    """Each frame word as one 16-bit little-endian unit (top bit zero)."""
    words = [f.to_word() for f in frames]
    if any(w >> 16 for w in words):
        raise ValueError("frame wider than 16 bits")
    return np.asarray(words, dtype="<u2").tobytes()


def load_frames(data: bytes, width: int = COARSE_BITS) -> list[TdcFrame]:
    if len(data) % 2:
        raise ValueError("binary dump must hold whole 16-bit units")
    return [TdcFrame.from_word(int(w), width) for w in np.frombuffer(data, dtype="<u2")]


def frames_csv(frames, windows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["window_s", "gc_hex", "pc", "f_hz"])
    for f, win in zip(frames, windows):
        w.writerow([f"{win:.8e}", f"{f.gc:03x}", f.pc, f"{decode_frequency(f, win):.8e}"])
    return buf.getvalue()
