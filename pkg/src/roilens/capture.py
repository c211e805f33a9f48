"""Throttled recording of exploratory signals and temporal segmentation.

Raw mouse-move events are recorded at most once per epsilon milliseconds.
The recorded stream is then partitioned into contiguous, time-ordered
segments by one of three strategies: fixed-length windows (PSI1), idle
cutoff (PSI2), or drift detection over concentric displacement rings (PSI3).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .geo import RoilensError, ScreenPoint


class OrderingError(RoilensError):
    """Raised when an event arrives with a timestamp older than one already seen."""


class Strategy(str, Enum):
    PSI1 = "psi1"
    PSI2 = "psi2"
    PSI3 = "psi3"


@dataclass
class CaptureConfig:
    """Recording throttle plus the parameters of every segmentation strategy.

    psi3 cuts a segment when the straight-line displacement over a sliding
    window of points moves to a different ring of `psi3_levels` and stays
    there for `psi3_persistence` consecutive windows.
    """

    epsilon_ms: int = 100
    strategy: Strategy = Strategy.PSI1
    psi1_segment_ms: int = 10_000
    psi2_idle_ms: int = 500
    psi2_idle_radius: float = 3.0
    psi3_levels: tuple = (5.0, 50.0, 500.0)
    psi3_window: int = 10
    psi3_persistence: int = 3

    def __post_init__(self):
        if isinstance(self.strategy, str):
            self.strategy = Strategy(self.strategy)
        self.psi3_levels = tuple(float(v) for v in self.psi3_levels)
        if self.epsilon_ms <= 0:
            raise ValueError("epsilon_ms must be > 0")
        if self.psi1_segment_ms <= 0 or self.psi2_idle_ms <= 0:
            raise ValueError("segment durations must be > 0")
        if self.psi2_idle_radius < 0:
            raise ValueError("psi2_idle_radius must be >= 0")
        if any(b <= a for a, b in zip(self.psi3_levels, self.psi3_levels[1:])):
            raise ValueError("psi3_levels must be strictly increasing")
        if self.psi3_window < 2 or self.psi3_persistence < 1:
            raise ValueError("psi3 window/persistence out of range")


@dataclass
class Segment:
    """Contiguous slice of the recorded stream; 1-based index, points time-ordered."""

    index: int
    points: list

    def __len__(self):
        return len(self.points)


@dataclass
class RecorderState:
    """Single-writer throttle state for one session's event stream."""

    epsilon_ms: int = 100
    points: list = field(default_factory=list)
    last_seen_t: int = -1
    last_accepted_t: int | None = None

    def snapshot(self) -> list:
        return list(self.points)


def record(raw: ScreenPoint, state: RecorderState) -> bool:
    """Apply the epsilon throttle to one raw event.

    The first event is always kept; afterwards an event is accepted iff at
    least epsilon ms elapsed since the last accepted one. Events must arrive
    in non-decreasing timestamp order.
    """
    if raw.t < state.last_seen_t:
        raise OrderingError(
            f"event at t={raw.t} arrived after t={state.last_seen_t}"
        )
    state.last_seen_t = raw.t
    if state.last_accepted_t is not None and raw.t - state.last_accepted_t < state.epsilon_ms:
        return False
    state.last_accepted_t = raw.t
    state.points.append(raw)
    return True


def segment_stream(points: list, cfg: CaptureConfig) -> list[Segment]:
    """Partition a time-ordered recorded stream into segments.

    The concatenation of the output equals the input; a point that triggers a
    cut is the last point of the closing segment. Empty input yields [].
    """
    if not points:
        return []
    for a, b in zip(points, points[1:]):
        if b.t < a.t:
            raise OrderingError(f"points not time-ordered at t={b.t}")

    if cfg.strategy is Strategy.PSI1:
        cut_after = _psi1_cuts(points, cfg)
    elif cfg.strategy is Strategy.PSI2:
        cut_after = _psi2_cuts(points, cfg)
    else:
        cut_after = _psi3_cuts(points, cfg)

    segments = []
    start = 0
    for i in range(len(points)):
        if i in cut_after and i + 1 < len(points):
            segments.append(Segment(len(segments) + 1, points[start:i + 1]))
            start = i + 1
    if start < len(points):
        segments.append(Segment(len(segments) + 1, points[start:]))
    return segments


def _psi1_cuts(points, cfg) -> set:
    """Fixed-length windows: cut when the next point falls in a later bucket.

    Buckets are [i*L, (i+1)*L) anchored at time zero; buckets with no recorded
    points produce no segment.
    """
    cuts = set()
    length = cfg.psi1_segment_ms
    for i in range(len(points) - 1):
        if points[i].t // length != points[i + 1].t // length:
            cuts.add(i)
    return cuts


def _psi2_cuts(points, cfg) -> set:
    """Idle cutoff: cut at the first point whose stationary run reaches idle_ms.

    A run is anchored at the first point of the current stillness; it survives
    while displacement from the anchor stays within psi2_idle_radius. After a
    cut the anchor resets so another full idle period must accumulate.
    """
    cuts = set()
    anchor = points[0]
    for i in range(1, len(points)):
        p = points[i]
        if math.hypot(p.x - anchor.x, p.y - anchor.y) > cfg.psi2_idle_radius:
            anchor = p
        elif p.t - anchor.t >= cfg.psi2_idle_ms:
            cuts.add(i)
            anchor = points[i + 1] if i + 1 < len(points) else p
    return cuts


def _ring_level(displacement: float, levels) -> int:
    for lvl, radius in enumerate(levels):
        if displacement <= radius:
            return lvl
    return len(levels)


def _psi3_cuts(points, cfg) -> set:
    """Drift detection: quantize window displacement into concentric rings.

    The displacement is the straight-line distance between the ends of a
    sliding window of psi3_window points. A cut fires once the ring level
    differs from the segment's level for psi3_persistence consecutive windows.
    """
    cuts = set()
    w = cfg.psi3_window
    if len(points) < w:
        return cuts
    current_level = None
    streak_level = None
    streak = 0
    for i in range(w - 1, len(points)):
        first, last = points[i - w + 1], points[i]
        level = _ring_level(math.hypot(last.x - first.x, last.y - first.y),
                            cfg.psi3_levels)
        if current_level is None:
            current_level = level
            continue
        if level == current_level:
            streak = 0
            streak_level = None
            continue
        if level == streak_level:
            streak += 1
        else:
            streak_level = level
            streak = 1
        if streak >= cfg.psi3_persistence:
            cuts.add(i)
            current_level = level
            streak = 0
            streak_level = None
    return cuts
