"""Single-sided spectrum of supply-current traces and band measurements."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .driver import CurrentTrace
from .errors import ResolutionError


@dataclass
class Spectrum:
    """Single-sided magnitude spectrum; bin 0 is the trace mean exactly."""

    freqs_hz: np.ndarray
    mags_a: np.ndarray
    rbw_hz: float

    def to_csv(self) -> str:
        lines = ["freq_hz,magnitude_a"]
        for f, m in zip(self.freqs_hz, self.mags_a):
            lines.append(f"{f:.6g},{m:.6g}")
        return "\n".join(lines) + "\n"


def spectrum(trace: CurrentTrace) -> Spectrum:
    """Rectangular-window DFT magnitude, mean-padded to a power of two.

    Padding with the mean (rather than zero) keeps bin 0 equal to the
    input trace mean and adds no artificial step at the trace end.
    """
    x = np.asarray(trace.samples, dtype=float)
    if len(x) == 0:
        raise ValueError("empty trace")
    mean = float(x.mean())
    n = 1 << (len(x) - 1).bit_length()
    if n != len(x):
        x = np.concatenate([x, np.full(n - len(x), mean)])

    X = np.fft.rfft(x) / n
    mags = np.abs(X)
    mags[1:] *= 2.0
    if n % 2 == 0:
        mags[-1] /= 2.0  # Nyquist bin is not mirrored
    dt_s = trace.dt_ps * 1e-12
    freqs = np.fft.rfftfreq(n, d=dt_s)
    return Spectrum(freqs_hz=freqs, mags_a=mags, rbw_hz=1.0 / (n * dt_s))


def mean_square(spec: Spectrum) -> float:
    """Mean-square value implied by the spectrum (Parseval form)."""
    m = spec.mags_a
    total = m[0] ** 2 + float(np.sum((m[1:-1] / np.sqrt(2.0)) ** 2))
    # last bin: Nyquist (unpaired) for even lengths handled as unscaled
    total += m[-1] ** 2
    return total


def low_band_ratio(spec: Spectrum, f_cut_hz: float = 5e8) -> float:
    """Largest magnitude in (0, f_cut] relative to the DC bin."""
    if spec.rbw_hz >= f_cut_hz / 10.0:
        raise ResolutionError(
            f"resolution {spec.rbw_hz:.3g} Hz too coarse for a {f_cut_hz:.3g} Hz band"
        )
    band = (spec.freqs_hz > 0) & (spec.freqs_hz <= f_cut_hz)
    peak = float(spec.mags_a[band].max()) if band.any() else 0.0
    dc = float(spec.mags_a[0])
    if dc == 0.0:
        return 0.0 if peak == 0.0 else float("inf")
    return peak / dc
