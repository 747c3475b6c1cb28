"""Eye-diagram folding and keep-out mask checking."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .driver import WaveformTrace
from .errors import AlignmentError


@dataclass
class EyeHistogram:
    """2D occupancy of the differential waveform folded over two unit intervals.

    Time axis is in unit intervals, [0, 2), with the eye center at 1.0.
    ``counts`` is indexed [voltage_bin, time_bin].
    """

    ui_ps: float
    counts: np.ndarray
    t_edges_ui: np.ndarray
    v_edges: np.ndarray
    fold_offset_ps: float = 0.0

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def merged_with(self, other: "EyeHistogram") -> "EyeHistogram":
        if (self.counts.shape != other.counts.shape
                or not np.array_equal(self.v_edges, other.v_edges)):
            raise AlignmentError("histograms use different grids")
        return EyeHistogram(self.ui_ps, self.counts + other.counts,
                            self.t_edges_ui, self.v_edges, self.fold_offset_ps)

    def to_csv(self) -> str:
        lines = []
        for row in self.counts:
            lines.append(",".join(str(int(c)) for c in row))
        return "\n".join(lines) + "\n"


@dataclass
class EyeMask:
    """Convex keep-out polygon in (UI offset from eye center, volts)."""

    vertices: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.vertices) < 3:
            raise ValueError("mask needs at least three vertices")
        # convexity: consistent turn direction around the polygon
        pts = list(self.vertices)
        n = len(pts)
        sign = 0
        for i in range(n):
            ax, ay = pts[i]
            bx, by = pts[(i + 1) % n]
            cx, cy = pts[(i + 2) % n]
            cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
            if cross != 0:
                if sign == 0:
                    sign = 1 if cross > 0 else -1
                elif (cross > 0) != (sign > 0):
                    raise ValueError("mask polygon must be convex")
        xs = sorted(round(x, 12) for x, _ in self.vertices)
        if any(abs(a + b) > 1e-9 for a, b in zip(xs, reversed(xs))):
            raise ValueError("mask polygon must be symmetric about the eye center")

    def contains(self, x: float, v: float) -> bool:
        pts = list(self.vertices)
        n = len(pts)
        sign = 0
        for i in range(n):
            ax, ay = pts[i]
            bx, by = pts[(i + 1) % n]
            cross = (bx - ax) * (v - ay) - (by - ay) * (x - ax)
            if cross != 0:
                if sign == 0:
                    sign = 1 if cross > 0 else -1
                elif (cross > 0) != (sign > 0):
                    return False
        return True

    def vertical_extent(self, x: float) -> tuple[float, float] | None:
        """Mask [v_min, v_max] at UI offset ``x``, or None if outside its span."""
        pts = list(self.vertices)
        n = len(pts)
        ys = []
        for i in range(n):
            (ax, ay), (bx, by) = pts[i], pts[(i + 1) % n]
            if ax == bx:
                if ax == x:
                    ys.extend([ay, by])
                continue
            lo, hi = (ax, bx) if ax < bx else (bx, ax)
            if lo <= x <= hi:
                ys.append(ay + (by - ay) * (x - ax) / (bx - ax))
        if not ys:
            return None
        return min(ys), max(ys)


def build_eye(tx_plus: WaveformTrace, tx_minus: WaveformTrace, ui_ps: float,
              bins_t: int = 128, bins_v: int = 128,
              fold_offset_ps: float = 0.0,
              v_range: tuple[float, float] | None = None) -> EyeHistogram:
    """Fold the differential signal modulo two unit intervals into a grid.

    ``fold_offset_ps`` picks the waveform time mapped to the left window
    edge; choose it half a UI before a bit center so the eye sits at the
    window center.
    """
    if tx_plus.dt_ps != tx_minus.dt_ps or tx_plus.t0_ps != tx_minus.t0_ps \
            or len(tx_plus.samples) != len(tx_minus.samples):
        raise AlignmentError("tx_plus and tx_minus are not on the same grid")
    n = len(tx_plus.samples)
    if n * tx_plus.dt_ps < 100 * ui_ps:
        raise ValueError("need at least 100 unit intervals of waveform")

    diff = np.asarray(tx_plus.samples, float) - np.asarray(tx_minus.samples, float)
    phase = np.mod(tx_plus.times() - fold_offset_ps, 2.0 * ui_ps) / ui_ps
    if v_range is None:
        vmax = float(np.abs(diff).max()) * 1.05 + 1e-9
        v_range = (-vmax, vmax)

    counts, t_edges, v_edges = np.histogram2d(
        phase, diff, bins=[bins_t, bins_v],
        range=[[0.0, 2.0], [v_range[0], v_range[1]]],
    )
    return EyeHistogram(ui_ps=ui_ps, counts=counts.T.astype(np.int64),
                        t_edges_ui=t_edges, v_edges=v_edges,
                        fold_offset_ps=fold_offset_ps)


def mask_check(eye: EyeHistogram, mask: EyeMask) -> tuple[bool, float]:
    """(pass, margin): no occupied bin center inside the keep-out polygon.

    Margin is the smallest vertical clearance between occupied bins and the
    mask boundary (negative when violated); with nothing near the mask it
    falls back to the clearance between mask and grid edge.
    """
    t_centers = 0.5 * (eye.t_edges_ui[:-1] + eye.t_edges_ui[1:]) - 1.0
    v_centers = 0.5 * (eye.v_edges[:-1] + eye.v_edges[1:])

    margin = None
    violated = False
    vi, ti = np.nonzero(eye.counts)
    for iv, it in zip(vi, ti):
        x, v = float(t_centers[it]), float(v_centers[iv])
        extent = mask.vertical_extent(x)
        if extent is None:
            continue
        v_lo, v_hi = extent
        if v < v_lo:
            d = v_lo - v
        elif v > v_hi:
            d = v - v_hi
        else:
            violated = True
            d = -min(v - v_lo, v_hi - v)
        margin = d if margin is None else min(margin, d)

    if margin is None:
        mask_vs = [v for _, v in mask.vertices]
        margin = min(eye.v_edges[-1] - max(mask_vs), min(mask_vs) - eye.v_edges[0])
    return (not violated, float(margin))
