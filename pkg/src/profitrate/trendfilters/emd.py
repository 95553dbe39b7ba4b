"""Empirical mode decomposition by envelope sifting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from ..core import Decomposition, InsufficientDataError, ProfitRateError, TimeSeries

__all__ = ["EmdSpec", "emd", "local_extrema", "count_zero_crossings", "envelope_mean"]


@dataclass(frozen=True)
class EmdSpec:
    max_imfs: int = 10
    sift_threshold: float = 0.2
    max_sifts: int = 50
    mirror_extrema: int = 2

    def __post_init__(self):
        if not self.sift_threshold > 0:
            raise ProfitRateError("sift_threshold must be positive")
        if self.max_sifts < 1:
            raise ProfitRateError("max_sifts must be at least 1")
        if self.max_imfs < 0:
            raise ProfitRateError("max_imfs must be non-negative")


def local_extrema(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Indices of strict interior maxima and minima (plateaus count once, at their centre)."""
    n = x.size
    maxima, minima = [], []
    i = 1
    while i < n - 1:
        j = i
        while j + 1 < n - 1 and x[j + 1] == x[i]:
            j += 1
        left, right = x[i - 1], x[j + 1]
        if x[i] > left and x[i] > right:
            maxima.append((i + j) // 2)
        elif x[i] < left and x[i] < right:
            minima.append((i + j) // 2)
        i = j + 1
    return np.array(maxima, dtype=int), np.array(minima, dtype=int)


def count_zero_crossings(x: np.ndarray) -> int:
    s = np.sign(x)
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def _mirror(t: np.ndarray, idx: np.ndarray, x: np.ndarray, k: int):
    """Reflect the first/last ``k`` extrema about the series end points."""
    n = x.size
    left_idx = idx[:k]
    right_idx = idx[-k:]
    tl = -t[left_idx][::-1]
    tr = 2 * (n - 1) - t[right_idx][::-1]
    tt = np.concatenate([tl, t[idx], tr])
    vv = np.concatenate([x[left_idx][::-1], x[idx], x[right_idx][::-1]])
    keep = np.concatenate([[True], np.diff(tt) > 0])
    return tt[keep], vv[keep]


def envelope_mean(x: np.ndarray, k: int = 2) -> np.ndarray | None:
    """Mean of the natural-cubic-spline envelopes, or ``None`` if ``x`` lacks oscillation."""
    maxima, minima = local_extrema(x)
    if maxima.size < 2 or minima.size < 2:
        return None
    t = np.arange(x.size, dtype=float)
    tu, vu = _mirror(t, maxima, x, k)
    tl, vl = _mirror(t, minima, x, k)
    upper = CubicSpline(tu, vu, bc_type="natural")(t)
    lower = CubicSpline(tl, vl, bc_type="natural")(t)
    return 0.5 * (upper + lower)


def emd(series: TimeSeries, spec: EmdSpec = EmdSpec()) -> Decomposition:
    """Decompose into intrinsic mode functions plus a residue (the trend).

    Sifting stops when the Cauchy-type standard deviation between successive
    sifts falls below ``sift_threshold`` or after ``max_sifts`` passes.
    Extraction stops once the residue has fewer than two maxima or two
    minima.
    """
    y = series.values
    if y.size < 4:
        raise InsufficientDataError("EMD needs at least 4 observations")
    residue = y.copy()
    imfs = []
    sift_counts = []
    while len(imfs) < spec.max_imfs:
        h = residue.copy()
        m = envelope_mean(h, spec.mirror_extrema)
        if m is None:
            break
        sifts = 0
        while True:
            sifts += 1
            h_new = h - m
            denom = np.dot(h, h)
            sd = np.dot(h - h_new, h - h_new) / denom if denom > 0 else 0.0
            h = h_new
            if sd < spec.sift_threshold or sifts >= spec.max_sifts:
                break
            m = envelope_mean(h, spec.mirror_extrema)
            if m is None:
                break
        imfs.append(h)
        sift_counts.append(sifts)
        residue = residue - h
    comps = {f"IMF{i + 1}": imf for i, imf in enumerate(imfs)}
    # residue is defined as the remainder so completeness is exact up to rounding
    trend = y - np.sum(imfs, axis=0) if imfs else y.copy()
    return Decomposition(series, trend, comps, "EMD", {"sifts": sift_counts})
