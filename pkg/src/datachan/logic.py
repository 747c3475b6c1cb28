"""Three-valued logic levels, net events and recorded signal traces."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple


class Level(enum.Enum):
    LOW = 0
    HIGH = 1
    UNKNOWN = 2

    def __repr__(self):
        return self.name

    @property
    def vcd_char(self) -> str:
        return {Level.LOW: "0", Level.HIGH: "1", Level.UNKNOWN: "x"}[self]


LOW = Level.LOW
HIGH = Level.HIGH
UNKNOWN = Level.UNKNOWN


def k_not(a: Level) -> Level:
    if a is UNKNOWN:
        return UNKNOWN
    return LOW if a is HIGH else HIGH


def k_and(*terms: Level) -> Level:
    if any(t is LOW for t in terms):
        return LOW
    if any(t is UNKNOWN for t in terms):
        return UNKNOWN
    return HIGH


def k_or(*terms: Level) -> Level:
    if any(t is HIGH for t in terms):
        return HIGH
    if any(t is UNKNOWN for t in terms):
        return UNKNOWN
    return LOW


class NetEvent(NamedTuple):
    """A logic transition on one net at an integer picosecond timestamp."""

    time_ps: int
    net: str
    level: Level


@dataclass
class SignalTraces:
    """Per-net event histories produced by one simulation run.

    ``events[net]`` is a strictly time-ordered list of ``(time_ps, level)``
    pairs in which consecutive entries always carry different levels.
    Instances are treated as immutable once a run has completed.
    """

    events: dict[str, list[tuple[int, Level]]]
    horizon_ps: int

    def nets(self) -> list[str]:
        return list(self.events)

    def level_at(self, net: str, time_ps: int) -> Level:
        """Level of ``net`` at ``time_ps`` (the last change at or before it)."""
        hist = self.events[net]
        lo, hi = 0, len(hist)
        while lo < hi:
            mid = (lo + hi) // 2
            if hist[mid][0] <= time_ps:
                lo = mid + 1
            else:
                hi = mid
        if lo == 0:
            return UNKNOWN
        return hist[lo - 1][1]

    def edges(self, net: str, kind: str = "rise") -> list[int]:
        """Times at which ``net`` transitions LOW->HIGH (rise) or HIGH->LOW (fall)."""
        want_from, want_to = (LOW, HIGH) if kind == "rise" else (HIGH, LOW)
        out = []
        prev = UNKNOWN
        for t, lvl in self.events[net]:
            if prev is want_from and lvl is want_to:
                out.append(t)
            prev = lvl
        return out

    def intervals(self, net: str, level: Level) -> list[tuple[int, int]]:
        """Closed-open time intervals during which ``net`` holds ``level``."""
        out = []
        start = None
        for t, lvl in self.events[net]:
            if start is not None:
                out.append((start, t))
                start = None
            if lvl is level:
                start = t
        if start is not None:
            out.append((start, self.horizon_ps))
        return out

    def last_time_at(self, net: str, level: Level) -> int | None:
        """Time of the last transition into ``level``, or None if never reached."""
        for t, lvl in reversed(self.events[net]):
            if lvl is level:
                return t
        return None


def merge_events(streams: Iterable[Iterable[NetEvent]]) -> list[NetEvent]:
    """Flatten several event streams into one stable time-ordered list."""
    merged = [ev for s in streams for ev in s]
    merged.sort(key=lambda ev: ev.time_ps)
    return merged
