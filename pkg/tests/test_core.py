import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from profitrate.core import (Decomposition, InsufficientDataError, NonFiniteError, ProfitRateError, TimeSeries,
                             linear_slope, make_rng, standardize, standardize_columns)


def test_slope_exact_line():
    assert linear_slope([1, 2, 3, 4]) == pytest.approx(1.0, abs=1e-14)


def test_slope_constant():
    assert linear_slope([5, 5, 5]) == 0.0


def test_slope_too_short():
    with pytest.raises(InsufficientDataError, match="insufficient observations"):
        linear_slope([1.0])


def test_slope_matches_polyfit(rng):
    y = rng.standard_normal(37)
    assert linear_slope(y) == pytest.approx(np.polyfit(np.arange(37), y, 1)[0], abs=1e-12)


def test_standardize_moments(rng):
    z = standardize(rng.normal(3, 7, 50))
    assert abs(z.mean()) < 1e-12
    assert abs(z.std(ddof=1) - 1) < 1e-12


def test_standardize_timeseries_roundtrip():
    s = TimeSeries(1960, np.array([1.0, 2.0, 4.0]), "x")
    z = standardize(s)
    assert isinstance(z, TimeSeries) and z.start_year == 1960


def test_standardize_constant():
    with pytest.raises(ProfitRateError, match="constant series"):
        standardize([2.0, 2.0, 2.0])


def test_standardize_columns_names_constant_column():
    X = np.column_stack([np.arange(5.0), np.ones(5)])
    with pytest.raises(ProfitRateError, match="constant column: b"):
        standardize_columns(X, ["a", "b"])


def test_timeseries_rejects_nan():
    with pytest.raises(NonFiniteError):
        TimeSeries(2000, np.array([1.0, np.nan]), "x")


def test_timeseries_rejects_empty():
    with pytest.raises(ProfitRateError):
        TimeSeries(2000, np.array([]), "x")


def test_timeseries_years_and_window():
    s = TimeSeries(1960, np.arange(10.0), "x")
    assert s.end_year == 1969
    w = s.window(2, 6)
    assert w.start_year == 1962 and list(w.values) == [2.0, 3.0, 4.0, 5.0]


def test_decomposition_length_check():
    s = TimeSeries(1960, np.arange(4.0), "x")
    with pytest.raises(ValueError):
        Decomposition(s, np.zeros(3), {}, "DW")
    with pytest.raises(ValueError):
        Decomposition(s, np.zeros(4), {}, "HP")


def test_rng_is_reproducible():
    a = make_rng(7).standard_normal(100)
    b = make_rng(7).standard_normal(100)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, make_rng(8).standard_normal(100))


def test_rng_accepts_full_64_bit_range():
    make_rng(2**64 - 1)
    with pytest.raises(ValueError):
        make_rng(-1)


@settings(max_examples=50, deadline=None)
@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.integers(2, 80))
def test_slope_of_affine_is_exact(a, b, n):
    y = a + b * np.arange(n)
    assert linear_slope(y) == pytest.approx(b, abs=1e-8 * (1 + abs(a) + abs(b) * n))
