"""Periodogram and short-time Fourier analysis of annual series.

Powers are one-sided and scaled so that they sum to the demeaned sum of
squares, i.e. ``n`` times the population variance of the segment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .core import InsufficientDataError, ProfitRateError, TimeSeries, as_finite_array

__all__ = [
    "Periodogram",
    "SeasonalityRow",
    "SeasonalityTable",
    "Spectrogram",
    "periodogram",
    "subperiod_seasonality",
    "stft",
    "additivity_verdict",
]


@dataclass(frozen=True)
class Periodogram:
    periods: np.ndarray  # n/k for k = 1..n//2
    power: np.ndarray
    no_seasonality: bool

    def ranked(self) -> list[tuple[float, float]]:
        """(period, power) pairs by descending power; ties go to the longer period."""
        order = np.lexsort((-self.periods, -self.power))
        return [(float(self.periods[i]), float(self.power[i])) for i in order]

    @property
    def total(self) -> float:
        return float(self.power.sum())


def _one_sided_power(x: np.ndarray) -> np.ndarray:
    n = x.size
    spec = np.abs(np.fft.rfft(x)) ** 2 / n
    power = 2.0 * spec[1:]
    if n % 2 == 0:
        power[-1] = spec[-1]
    return power[: n // 2]


def periodogram(series, taper: str = "rectangular") -> Periodogram:
    """Raw periodogram at the Fourier frequencies ``k/n``, ``k = 1 .. n//2``."""
    y = series.values if isinstance(series, TimeSeries) else as_finite_array(series).ravel()
    n = y.size
    if n < 4:
        raise InsufficientDataError("periodogram needs at least 4 observations")
    x = y - y.mean()
    if taper == "hann":
        x = x * np.hanning(n)
    elif taper != "rectangular":
        raise ValueError(f"unknown taper {taper!r}")
    power = _one_sided_power(x)
    # rounding noise on a constant input is not signal
    scale = max(np.abs(y).max(), 1.0)
    if np.all(np.abs(x) <= 1e-12 * scale):
        power = np.zeros_like(power)
    periods = n / np.arange(1, n // 2 + 1)
    return Periodogram(periods, power, bool(np.all(power == 0)))


@dataclass(frozen=True)
class SeasonalityRow:
    start_year: int
    end_year: int
    primary_period: int
    secondary_period: int
    primary_power: float
    secondary_power: float
    n_obs: int

    @property
    def amplitude(self) -> float:
        return float(np.sqrt(self.primary_power))


@dataclass(frozen=True)
class SeasonalityTable:
    rows: tuple[SeasonalityRow, ...]

    def __len__(self) -> int:
        return len(self.rows)

    def as_records(self) -> list[dict]:
        return [
            {
                "period": f"{r.start_year}-{r.end_year}",
                "primary_seasonality": r.primary_period,
                "secondary_seasonality": r.secondary_period,
            }
            for r in self.rows
        ]


def _top_two(pg: Periodogram) -> tuple[tuple[int, float], tuple[int, float]]:
    ranked = pg.ranked()
    first = (int(round(ranked[0][0])), ranked[0][1])
    for period, power in ranked[1:]:
        if int(round(period)) != first[0]:
            return first, (int(round(period)), power)
    return first, (first[0], 0.0)


def subperiod_seasonality(series: TimeSeries, window_years: int = 9) -> SeasonalityTable:
    """Top-two periods in consecutive ``window_years``-year spans.

    Each span covers ``window_years + 1`` observations and consecutive spans
    share their boundary year (1960-1969, 1969-1978, ...).  The final span
    keeps whatever observations remain.
    """
    if window_years < 4:
        raise ProfitRateError("window_years must be at least 4")
    n = len(series)
    if window_years + 1 > n:
        raise ProfitRateError(f"window of {window_years + 1} observations exceeds series length {n}")
    rows = []
    start = 0
    while start < n - 1:
        stop = min(start + window_years + 1, n)
        if stop - start < 4:
            break
        seg = series.window(start, stop)
        (p1, w1), (p2, w2) = _top_two(periodogram(seg))
        rows.append(SeasonalityRow(seg.start_year, seg.end_year, p1, p2, w1, w2, len(seg)))
        if stop == n:
            break
        start += window_years
    return SeasonalityTable(tuple(rows))


@dataclass(frozen=True)
class Spectrogram:
    periods: np.ndarray  # row labels, window/k
    starts: np.ndarray  # positional start of each column's segment
    power: np.ndarray  # len(periods) x len(starts)
    window: int
    hop: int

    def top_periods(self) -> np.ndarray:
        return np.array([
            Periodogram(self.periods, self.power[:, j], False).ranked()[0][0]
            for j in range(self.power.shape[1])
        ])


def stft(series, window: int, overlap: int, taper: str = "hann") -> Spectrogram:
    """Periodograms of successive (optionally Hann-tapered) segments.

    Each column sums to the squared deviation of the tapered segment about
    its own mean (the zero frequency is not reported).
    """
    y = series.values if isinstance(series, TimeSeries) else as_finite_array(series).ravel()
    n = y.size
    if not (0 <= overlap < window <= n):
        raise ProfitRateError(f"need 0 <= overlap < window <= length, got overlap={overlap}, window={window}, n={n}")
    if window < 4:
        raise ProfitRateError("window must cover at least 4 observations")
    hop = window - overlap
    starts = np.arange(0, n - window + 1, hop)
    cols = [periodogram(y[s:s + window], taper=taper).power for s in starts]
    return Spectrogram(window / np.arange(1, window // 2 + 1), starts, np.column_stack(cols), window, hop)


def additivity_verdict(table: SeasonalityTable, alpha: float = 0.05) -> str:
    """``"additive"`` unless peak seasonal amplitude grows significantly across windows.

    Amplitude is the square root of the peak periodogram power per window;
    the test is a one-sided t-test on the OLS slope against window index.
    """
    if len(table) < 2:
        raise ProfitRateError("additivity verdict needs at least 2 windows")
    amp = np.array([r.amplitude for r in table.rows])
    if len(amp) < 3:
        return "additive"
    res = stats.linregress(np.arange(amp.size, dtype=float), amp)
    if res.slope <= 0:
        return "additive"
    if res.stderr == 0:
        return "multiplicative"
    t = res.slope / res.stderr
    p = stats.t.sf(t, amp.size - 2)
    return "multiplicative" if p < alpha else "additive"


def dominance_ratio(pg: Periodogram) -> float:
    """Peak power over median power; large values indicate a dominant cycle."""
    med = float(np.median(pg.power))
    if med == 0:
        return np.inf if pg.power.max() > 0 else 0.0
    return float(pg.power.max() / med)
