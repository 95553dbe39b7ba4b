import numpy as np
import pytest

from profitrate.core import TimeSeries, make_rng


@pytest.fixture
def rng():
    return make_rng(12345)


@pytest.fixture
def white_noise():
    return make_rng(0).standard_normal(200)


@pytest.fixture
def random_walk():
    return np.cumsum(make_rng(0).standard_normal(200))


def as_series(values, start=1960, label="test"):
    return TimeSeries(start, np.asarray(values, dtype=float), label)
