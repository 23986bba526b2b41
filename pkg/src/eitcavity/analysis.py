"""Extremum detection and EIT-like window classification on sampled curves.

A *window* is an interior minimum whose neighbours in the (alternating) list of
significant extrema are both maxima. Significance is topographic prominence
measured as a fraction of the curve's full range.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.signal import peak_prominences

from .errors import EmptyCurveError

DEFAULT_PROMINENCE = 0.02


class Extremum(NamedTuple):
    position: float
    value: float
    prominence: float


@dataclass(frozen=True)
class ExtremaReport:
    maxima: tuple[Extremum, ...]
    minima: tuple[Extremum, ...]
    prominence_threshold: float
    relative_prominence: float = DEFAULT_PROMINENCE

    def ordered(self) -> list[tuple[str, Extremum]]:
        merged = [("max", e) for e in self.maxima] + [("min", e) for e in self.minima]
        return sorted(merged, key=lambda item: item[1].position)


@dataclass(frozen=True)
class WindowReport:
    window_count: int
    dip_positions: tuple[float, ...]
    dip_depths: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "window_count": self.window_count,
            "dip_positions": list(self.dip_positions),
            "dip_depths": list(self.dip_depths),
        }


def _local_peaks(y):
    """Indices of strict interior local maxima; plateaus report their leftmost point."""
    peaks = []
    n = len(y)
    i = 1
    while i < n - 1:
        if y[i] > y[i - 1]:
            j = i
            while j + 1 < n and y[j + 1] == y[i]:
                j += 1
            if j + 1 < n and y[j + 1] < y[i]:
                peaks.append(i)
            i = j + 1
        else:
            i += 1
    return np.array(peaks, dtype=int)


def _significant(y, threshold):
    peaks = _local_peaks(y)
    if peaks.size == 0:
        return peaks, np.empty(0)
    prominences = peak_prominences(y, peaks)[0]
    keep = prominences >= threshold
    return peaks[keep], prominences[keep]


def _enforce_alternation(items):
    """Collapse runs of same-kind extrema to the most extreme member."""
    out = []
    for kind, idx, prom, val in items:
        if out and out[-1][0] == kind:
            prev = out[-1]
            better = val > prev[3] if kind == "max" else val < prev[3]
            if better:
                out[-1] = (kind, idx, prom, val)
        else:
            out.append((kind, idx, prom, val))
    return out


def find_extrema(grid, values, prominence: float = DEFAULT_PROMINENCE) -> ExtremaReport:
    """Interior local maxima and minima whose prominence is at least
    ``prominence * (max(values) - min(values))``.

    Non-finite samples (flagged sweep points) are dropped before the search.
    """
    if prominence < 0:
        raise ValueError("prominence must be >= 0")
    x = np.asarray(grid, dtype=float)
    y = np.asarray(values, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("grid and values must be 1-D arrays of equal length")
    if x.size < 3:
        raise ValueError("need at least 3 samples")
    finite = np.isfinite(y)
    if not finite.any():
        raise EmptyCurveError("curve has no finite samples")
    x, y = x[finite], y[finite]

    threshold = prominence * float(y.max() - y.min())
    max_idx, max_prom = _significant(y, threshold)
    min_idx, min_prom = _significant(-y, threshold)
    items = sorted(
        [("max", int(i), float(p), float(y[i])) for i, p in zip(max_idx, max_prom)]
        + [("min", int(i), float(p), float(y[i])) for i, p in zip(min_idx, min_prom)],
        key=lambda item: item[1])
    items = _enforce_alternation(items)
    maxima = tuple(Extremum(float(x[i]), v, p) for k, i, p, v in items if k == "max")
    minima = tuple(Extremum(float(x[i]), v, p) for k, i, p, v in items if k == "min")
    return ExtremaReport(maxima, minima, threshold, prominence)


def classify_window(report: ExtremaReport) -> WindowReport:
    """Count minima flanked on both sides by significant maxima."""
    ordered = report.ordered()
    positions, depths = [], []
    for k in range(1, len(ordered) - 1):
        kind, dip = ordered[k]
        if kind != "min" or ordered[k - 1][0] != "max" or ordered[k + 1][0] != "max":
            continue
        flank = 0.5 * (ordered[k - 1][1].value + ordered[k + 1][1].value)
        positions.append(dip.position)
        depths.append(1.0 - dip.value / flank if flank != 0 else 0.0)
    return WindowReport(len(positions), tuple(positions), tuple(depths))


def detect_windows(curve, channel: str, prominence: float = DEFAULT_PROMINENCE) -> WindowReport:
    """Window classification of one channel of a response or spectrum curve."""
    return classify_window(find_extrema(curve.grid, curve.channel(channel), prominence))
