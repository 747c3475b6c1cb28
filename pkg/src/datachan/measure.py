"""Level and 20%-80% edge-time extraction from sampled waveforms."""

from __future__ import annotations

import numpy as np

from .driver import WaveformTrace
from .errors import NoSettleError, NoTransitionError

_MODE_BINS = 2001


def measure_levels(trace: WaveformTrace) -> tuple[float, float, float]:
    """(v_high, v_low, swing) from the settled-sample modes of each state.

    The mode of a fine histogram is used instead of a mean so edge samples
    cannot bias the settled levels.
    """
    v = np.asarray(trace.samples, dtype=float)
    if len(v) == 0:
        raise NoSettleError("empty trace")
    vmin, vmax = float(v.min()), float(v.max())
    if vmax - vmin < 1e-12:
        return vmin, vmin, 0.0

    mid = 0.5 * (vmin + vmax)
    levels = []
    for cls in (v[v > mid], v[v <= mid]):
        counts, edges = np.histogram(cls, bins=_MODE_BINS, range=(vmin, vmax))
        k = int(np.argmax(counts))
        if counts[k] < 3:
            raise NoSettleError("no settled interval found")
        sel = cls[(cls >= edges[k]) & (cls <= edges[k + 1])]
        levels.append(float(sel.mean()))
    v_high, v_low = levels
    return v_high, v_low, v_high - v_low


def _up_crossings(t: np.ndarray, v: np.ndarray, th: float) -> np.ndarray:
    idx = np.nonzero((v[:-1] < th) & (v[1:] >= th))[0]
    frac = (th - v[idx]) / (v[idx + 1] - v[idx])
    return t[idx] + frac * (t[idx + 1] - t[idx])


def _down_crossings(t: np.ndarray, v: np.ndarray, th: float) -> np.ndarray:
    idx = np.nonzero((v[:-1] > th) & (v[1:] <= th))[0]
    frac = (v[idx] - th) / (v[idx] - v[idx + 1])
    return t[idx] + frac * (t[idx + 1] - t[idx])


def measure_edge(trace: WaveformTrace, which: str) -> float:
    """Mean 20%-80% duration over all transitions of the given polarity."""
    if which not in ("rise", "fall"):
        raise ValueError("which must be 'rise' or 'fall'")
    v_high, v_low, swing = measure_levels(trace)
    if swing <= 0:
        raise NoTransitionError("waveform has no swing")
    th20 = v_low + 0.2 * swing
    th80 = v_low + 0.8 * swing

    t = trace.times()
    v = np.asarray(trace.samples, dtype=float)
    if which == "rise":
        starts = _up_crossings(t, v, th20)
        ends = _up_crossings(t, v, th80)
    else:
        starts = _down_crossings(t, v, th80)
        ends = _down_crossings(t, v, th20)

    durations = []
    j = 0
    for i, t_start in enumerate(starts):
        next_start = starts[i + 1] if i + 1 < len(starts) else np.inf
        while j < len(ends) and ends[j] <= t_start:
            j += 1
        if j < len(ends) and ends[j] < next_start:
            durations.append(ends[j] - t_start)
    if not durations:
        raise NoTransitionError(f"no complete {which} transition found")
    return float(np.mean(durations))
