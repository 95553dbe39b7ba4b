import numpy as np
import pytest

from profitrate.core import make_rng
from profitrate.trendfilters import EmdSpec, emd
from profitrate.trendfilters.emd import count_zero_crossings, envelope_mean, local_extrema

from conftest import as_series


def sine_plus_line(n=200):
    t = np.arange(n, dtype=float)
    return np.sin(2 * np.pi * t / 20), 0.01 * t + 0.5


def test_local_extrema_simple():
    mx, mn = local_extrema(np.array([0.0, 2, 1, 3, 0, 1, 1, 1, 0]))
    assert list(mx) == [1, 3, 6]
    assert list(mn) == [2, 4]


def test_zero_crossings():
    assert count_zero_crossings(np.array([1.0, -1, 0, -2, 3])) == 2


def test_envelope_mean_none_without_oscillation():
    assert envelope_mean(np.arange(10.0)) is None


@pytest.mark.parametrize("seed", range(10))
def test_completeness_random(seed):
    y = np.cumsum(make_rng(seed).standard_normal(61))
    d = emd(as_series(y))
    assert d.reconstruction_error() < 1e-8


def test_sine_plus_line_recovers_generators():
    s, line = sine_plus_line()
    d = emd(as_series(s + line))
    assert d.reconstruction_error() < 1e-8
    assert np.corrcoef(d.components["IMF1"], s)[0, 1] > 0.95
    assert np.corrcoef(d.trend, line)[0, 1] > 0.99


def test_monotone_input_has_no_imfs():
    y = np.linspace(0, 1, 30) ** 2
    d = emd(as_series(y))
    assert d.components == {}
    assert np.array_equal(d.trend, y)


def test_residue_lacks_oscillation():
    y = np.cumsum(make_rng(4).standard_normal(61))
    d = emd(as_series(y))
    mx, mn = local_extrema(d.trend)
    assert mx.size < 2 or mn.size < 2


def test_imf_extrema_and_crossings_agree():
    s, line = sine_plus_line()
    d = emd(as_series(s + line))
    imf = d.components["IMF1"]
    mx, mn = local_extrema(imf)
    assert abs(mx.size + mn.size - count_zero_crossings(imf)) <= 1


def test_max_imfs_respected():
    y = np.cumsum(make_rng(5).standard_normal(120))
    assert len(emd(as_series(y), EmdSpec(max_imfs=1)).components) == 1


def test_sift_threshold_must_be_positive():
    with pytest.raises(ValueError):
        EmdSpec(sift_threshold=0.0)
