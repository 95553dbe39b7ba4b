import time

import numpy as np
import pytest

from profitrate.core import ProfitRateError, make_rng
from profitrate.trendfilters import EhpSpec, ehp, hp_filter
from profitrate.trendfilters.ehp import second_difference

from conftest import as_series


def smooth_plus_noise(seed=11, n=61):
    t = np.arange(n, dtype=float)
    return 0.25 - 0.002 * t + 0.01 * np.sin(2 * np.pi * t / 40) + 0.004 * make_rng(seed).standard_normal(n)


def test_hp_filter_matches_dense_solve(rng):
    y = rng.standard_normal(30)
    D = second_difference(30)
    dense = np.linalg.solve(np.eye(30) + 100.0 * D.T @ D, y)
    assert np.max(np.abs(hp_filter(y, 100.0) - dense)) < 1e-10


def test_hp_filter_preserves_lines():
    y = 3.0 - 0.5 * np.arange(20)
    assert np.max(np.abs(hp_filter(y, 1600.0) - y)) < 1e-9


def test_cross_validation_against_closed_form_hp():
    y = smooth_plus_noise()
    res = ehp(as_series(y), EhpSpec(draws=4000, burn_in=500, seed=1))
    oracle = hp_filter(y, res.smoothing)
    assert np.corrcoef(res.mean_trend.trend, oracle)[0, 1] > 0.99


@pytest.mark.parametrize("y", [0.3 - 0.004 * np.arange(61), np.arange(1.0, 62.0)])
def test_exact_linear_input_returns_itself(y):
    res = ehp(as_series(y), EhpSpec(draws=2000, burn_in=200, seed=0))
    assert np.max(np.abs(res.mean_trend.trend - y)) < 1e-3


def test_fixed_seed_is_bit_identical():
    y = smooth_plus_noise()
    a = ehp(as_series(y), EhpSpec(draws=500, burn_in=100, seed=9))
    b = ehp(as_series(y), EhpSpec(draws=500, burn_in=100, seed=9))
    assert np.array_equal(a.mean_trend.trend, b.mean_trend.trend)
    assert np.array_equal(a.draw_log, b.draw_log)


def test_additivity_exact():
    y = smooth_plus_noise()
    res = ehp(as_series(y), EhpSpec(draws=300, burn_in=50))
    assert res.mean_trend.reconstruction_error() < 1e-12
    assert res.last_draw_trend.reconstruction_error() < 1e-12


def test_draw_log_shape_and_positivity():
    res = ehp(as_series(smooth_plus_noise()), EhpSpec(draws=300, burn_in=50))
    assert res.draw_log.shape == (300, 3)
    assert np.all(res.draw_log[:, 1:] > 0)


def test_runtime_full_chain():
    t0 = time.perf_counter()
    ehp(as_series(smooth_plus_noise()), EhpSpec(draws=10000, burn_in=1000))
    assert time.perf_counter() - t0 < 30.0


def test_draws_must_exceed_burn_in():
    with pytest.raises(ProfitRateError):
        EhpSpec(draws=100, burn_in=100)
