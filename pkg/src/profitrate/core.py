"""Shared types and small numeric helpers.

Every stochastic routine in the package draws from :func:`make_rng`, which
wraps numpy's counter-based Philox bit generator so that a seed means the
same stream on every platform and numpy build.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "ProfitRateError",
    "InsufficientDataError",
    "NonFiniteError",
    "NumericalError",
    "TimeSeries",
    "Decomposition",
    "FILTER_TAGS",
    "make_rng",
    "linear_slope",
    "standardize",
]


class ProfitRateError(ValueError):
    """Base class for data and numerical errors raised by this package."""


class InsufficientDataError(ProfitRateError):
    pass


class NumericalError(ProfitRateError):
    """An algorithm failed numerically (singular system, non-finite objective)."""


class NonFiniteError(ProfitRateError):
    pass


def as_finite_array(values, name: str = "values") -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.size and not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{name} contains NaN or infinite entries")
    return arr


@dataclass(frozen=True)
class TimeSeries:
    """Annual series starting at ``start_year``."""

    start_year: int
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        arr = as_finite_array(self.values).ravel()
        if arr.size == 0:
            raise InsufficientDataError("time series is empty")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "start_year", int(self.start_year))

    def __len__(self) -> int:
        return self.values.size

    @property
    def years(self) -> np.ndarray:
        return self.start_year + np.arange(self.values.size)

    @property
    def end_year(self) -> int:
        return self.start_year + self.values.size - 1

    def with_values(self, values, label: str | None = None) -> "TimeSeries":
        return TimeSeries(self.start_year, values, self.label if label is None else label)

    def window(self, start: int, stop: int) -> "TimeSeries":
        """Positional slice ``[start, stop)`` keeping the year alignment."""
        return TimeSeries(self.start_year + start, self.values[start:stop], self.label)


FILTER_TAGS = ("DW", "EMD", "EHP")


@dataclass(frozen=True)
class Decomposition:
    """Additive split ``source = trend + sum(components)`` (up to the filter's tolerance)."""

    source: TimeSeries
    trend: np.ndarray
    components: dict[str, np.ndarray] = field(default_factory=dict)
    filter_tag: str = "DW"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.filter_tag not in FILTER_TAGS:
            raise ValueError(f"unknown filter tag {self.filter_tag!r}")
        n = len(self.source)
        trend = np.asarray(self.trend, dtype=float)
        if trend.shape != (n,):
            raise ValueError("trend length differs from source")
        comps = {}
        for name, c in self.components.items():
            c = np.asarray(c, dtype=float)
            if c.shape != (n,):
                raise ValueError(f"component {name!r} length differs from source")
            comps[name] = c
        object.__setattr__(self, "trend", trend)
        object.__setattr__(self, "components", comps)

    def reconstruction(self) -> np.ndarray:
        total = self.trend.copy()
        for c in self.components.values():
            total += c
        return total

    def reconstruction_error(self) -> float:
        return float(np.max(np.abs(self.reconstruction() - self.source.values)))

    def trend_series(self) -> TimeSeries:
        return self.source.with_values(self.trend, f"{self.source.label} {self.filter_tag} trend".strip())


def make_rng(seed: int) -> np.random.Generator:
    """Generator for a 64-bit seed; Philox keeps streams portable across builds."""
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return np.random.Generator(np.random.Philox(seed))


def _values(series) -> np.ndarray:
    if isinstance(series, TimeSeries):
        return series.values
    return as_finite_array(series).ravel()


def linear_slope(series) -> float:
    """OLS slope of the values on the year index (units per year)."""
    y = _values(series)
    if y.size < 2:
        raise InsufficientDataError("insufficient observations")
    x = np.arange(y.size, dtype=float)
    xc = x - x.mean()
    return float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))


def standardize(series):
    """Center and scale to unit sample (n-1) standard deviation.

    Accepts a :class:`TimeSeries` (returned as one) or a plain sequence.
    """
    y = _values(series)
    if y.size < 2:
        raise InsufficientDataError("insufficient observations")
    sd = y.std(ddof=1)
    if not sd > 0:
        raise ProfitRateError("constant series")
    z = (y - y.mean()) / sd
    if isinstance(series, TimeSeries):
        return series.with_values(z)
    return z


def standardize_columns(X: np.ndarray, names: Sequence[str] | None = None) -> np.ndarray:
    X = as_finite_array(X, "matrix")
    sd = X.std(axis=0, ddof=1)
    bad = np.flatnonzero(~(sd > 1e-14 * np.maximum(1.0, np.abs(X).max(axis=0))))
    if bad.size:
        label = names[bad[0]] if names is not None else f"column {bad[0]}"
        raise ProfitRateError(f"constant column: {label}")
    return (X - X.mean(axis=0)) / sd
