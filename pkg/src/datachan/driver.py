"""Behavioral output-stage and supply-network models.

The output driver is an open-drain current sink into remote pull-ups:
each leg sits at ``avcc - i_standby*r`` when released and at
``avcc - (i_standby + i_sink)*r`` while sinking, with configurable
20%-80% edge shaping.  Supply noise is modeled as one triangular charge
spike per pre-driver line transition on top of a quiescent DC draw.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .config import DriverParams, SpikeModel
from .errors import SamplingError
from .golden import BitStream
from .logic import HIGH, LOW, Level, SignalTraces

LN4 = math.log(4.0)
# 20%-80% span of the raised-cosine step, as a fraction of its full duration
_RC_SPAN = (math.acos(-0.6) - math.acos(0.6)) / math.pi


@dataclass
class WaveformTrace:
    """Uniformly sampled voltage series."""

    dt_ps: float
    samples: np.ndarray
    t0_ps: float = 0.0

    def times(self) -> np.ndarray:
        return self.t0_ps + self.dt_ps * np.arange(len(self.samples))


@dataclass
class CurrentTrace:
    """Uniformly sampled current series (non-negative)."""

    dt_ps: float
    samples: np.ndarray
    t0_ps: float = 0.0

    def times(self) -> np.ndarray:
        return self.t0_ps + self.dt_ps * np.arange(len(self.samples))


def _sink_timeline(traces: SignalTraces, nets: tuple[str, str],
                   t_start: int, t_end: int) -> list[tuple[int, bool]]:
    """Merged (time, sinking) steps: sinking while either net is pulled low."""
    times = sorted({t for net in nets for t, _ in traces.events[net]
                    if t_start < t < t_end})
    steps = []
    state = any(traces.level_at(net, t_start) is LOW for net in nets)
    steps.append((t_start, state))
    for t in times:
        state = any(traces.level_at(net, t) is LOW for net in nets)
        if state != steps[-1][1]:
            steps.append((t, state))
    return steps


def _shape_segments(steps: list[tuple[int, bool]], params: DriverParams,
                    dt_ps: float, t_start: float, n: int) -> np.ndarray:
    v_hi, v_lo = params.v_standby, params.v_sink
    out = np.empty(n)
    v = v_lo if steps[0][1] else v_hi

    if params.edge_model == "EXPONENTIAL":
        tau = params.t_rf_ps / LN4 if params.t_rf_ps > 0 else 0.0
    else:
        t_full = params.t_rf_ps / _RC_SPAN if params.t_rf_ps > 0 else 0.0

    bounds = [t for t, _ in steps[1:]] + [t_start + n * dt_ps]
    for (seg_t, sinking), seg_end in zip(steps, bounds):
        target = v_lo if sinking else v_hi
        i0 = max(0, math.ceil((seg_t - t_start) / dt_ps))
        i1 = min(n, math.ceil((seg_end - t_start) / dt_ps))
        ts = t_start + dt_ps * np.arange(i0, i1)
        rel = ts - seg_t
        if params.edge_model == "EXPONENTIAL":
            if tau == 0.0:
                out[i0:i1] = target
                v = target
            else:
                out[i0:i1] = target + (v - target) * np.exp(-rel / tau)
                v = target + (v - target) * math.exp(-(seg_end - seg_t) / tau)
        else:
            if t_full == 0.0:
                out[i0:i1] = target
                v = target
            else:
                u = np.clip(rel / t_full, 0.0, 1.0)
                out[i0:i1] = v + (target - v) * 0.5 * (1.0 - np.cos(np.pi * u))
                ue = min(max((seg_end - seg_t) / t_full, 0.0), 1.0)
                v = v + (target - v) * 0.5 * (1.0 - math.cos(math.pi * ue))
    return out


def synthesize_tx(traces: SignalTraces, params: DriverParams, dt_ps: float,
                  t_start: int | None = None, t_end: int | None = None,
                  ui_ps: float | None = None) -> tuple[WaveformTrace, WaveformTrace]:
    """Differential output pair from the four pre-driver line traces.

    Tx- sinks while Even or Odd is active (serialized bit 1); Tx+ sinks
    while a complement line is active (bit 0).  In standby both legs sit
    at the pulled-up standby level.
    """
    params.validate()
    if ui_ps is not None and dt_ps * 32 > ui_ps:
        raise SamplingError(
            f"dt={dt_ps} ps gives fewer than 32 samples per {ui_ps} ps interval"
        )
    t0 = 0 if t_start is None else t_start
    t1 = traces.horizon_ps if t_end is None else t_end
    n = int((t1 - t0) / dt_ps)

    minus_steps = _sink_timeline(traces, ("Even", "Odd"), t0, t1)
    plus_steps = _sink_timeline(traces, ("nEven", "nOdd"), t0, t1)
    tx_minus = _shape_segments(minus_steps, params, dt_ps, t0, n)
    tx_plus = _shape_segments(plus_steps, params, dt_ps, t0, n)
    return (WaveformTrace(dt_ps, tx_plus, t0), WaveformTrace(dt_ps, tx_minus, t0))


# --------------------------------------------------------------------------
# supply current

def line_transition_times(traces: SignalTraces,
                          nets: tuple[str, ...] = ("Even", "Odd", "nEven", "nOdd"),
                          ) -> list[int]:
    """Settled HIGH<->LOW transition times on the pre-driver lines."""
    out = []
    for net in nets:
        prev = None
        for t, lvl in traces.events[net]:
            if {prev, lvl} == {HIGH, LOW}:
                out.append(t)
            prev = lvl
    out.sort()
    return out


def _deposit_spike(samples: np.ndarray, t0: float, dt: float,
                   center: float, q: float, w: float) -> None:
    """Add one triangular spike, conserving its charge bin-exactly."""
    a, b = center - w / 2.0, center + w / 2.0
    i0 = max(0, int(math.floor((a - t0) / dt + 0.5)))
    i1 = min(len(samples) - 1, int(math.ceil((b - t0) / dt + 0.5)))
    if i1 < i0:
        return
    edges = t0 + dt * (np.arange(i0, i1 + 2) - 0.5)

    t = np.clip(edges, a, b)
    left = np.minimum(t, center)
    right = np.maximum(t, center)
    cum = 2.0 * q * (left - a) ** 2 / w**2 + (q - 2.0 * q * (b - right) ** 2 / w**2)
    cum -= q / 2.0  # remove double-counted apex value
    samples[i0:i1 + 1] += np.diff(cum) / (dt * 1e-12)  # charge per bin -> amperes


def supply_current(transition_times_ps: list[float], model: SpikeModel,
                   dt_ps: float, t0_ps: float, horizon_ps: float) -> CurrentTrace:
    """Quiescent DC draw plus one charge spike per line transition."""
    model.validate()
    n = int((horizon_ps - t0_ps) / dt_ps)
    samples = np.full(n, model.i_dc_a)
    for t in transition_times_ps:
        _deposit_spike(samples, t0_ps, dt_ps, float(t), model.q_c, model.w_ps)
    return CurrentTrace(dt_ps, samples, t0_ps)


def naive_supply_current(bitstream: BitStream, model: SpikeModel,
                         dt_ps: float) -> CurrentTrace:
    """Single-pre-driver baseline: spikes only where the raw data toggles.

    Each data transition flips both legs of the differential pre-driver
    pair, so it deposits two spike charges.  Spike timing then follows the
    data pattern instead of the fixed bit-rate grid.
    """
    model.validate()
    t0 = float(bitstream.start_time_ps)
    horizon = t0 + float(len(bitstream.bits) * bitstream.bit_period)
    n = int((horizon - t0) / dt_ps)
    samples = np.full(n, model.i_dc_a)
    for t in bitstream.transition_times():
        _deposit_spike(samples, t0, dt_ps, float(t), 2.0 * model.q_c, model.w_ps)
    return CurrentTrace(dt_ps, samples, t0)


# --------------------------------------------------------------------------
# CSV export

def trace_to_csv(trace: WaveformTrace | CurrentTrace) -> str:
    lines = ["time_ps,value"]
    t = trace.t0_ps
    for v in trace.samples:
        lines.append(f"{t:.3f},{v:.6g}")
        t += trace.dt_ps
    return "\n".join(lines) + "\n"
