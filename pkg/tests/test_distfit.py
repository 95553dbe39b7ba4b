import numpy as np
import pytest
from scipy import stats

from profitrate.core import make_rng
from profitrate.distfit import FitError, fit, select

LOGN_SEED = 3  # see test_lognormal_recovery_rate for the per-draw pass rate


def lognormal_sample(seed=LOGN_SEED, n=1000):
    return np.exp(make_rng(seed).normal(-1.31, 1.30, n))


def test_lognormal_mle_closed_form():
    x = lognormal_sample()
    f = fit(x, "lognormal", "mle")
    assert f.params["meanlog"] == pytest.approx(np.log(x).mean(), abs=1e-12)
    assert f.params["sdlog"] == pytest.approx(np.log(x).std(), abs=1e-12)


def test_lognormal_recovery_and_bic_win():
    x = lognormal_sample()
    f = fit(x, "lognormal", "mle")
    assert abs(f.params["meanlog"] + 1.31) < 0.05
    assert abs(f.params["sdlog"] - 1.30) < 0.05
    assert select(x).best.family == "lognormal"


def test_lognormal_recovery_rate():
    # meanlog standard error is 1.3/sqrt(1000) ~ 0.041, so +-0.05 holds on most but not all draws
    hits = 0
    for seed in range(40):
        f = fit(lognormal_sample(seed), "lognormal", "mle")
        hits += abs(f.params["meanlog"] + 1.31) < 0.05 and abs(f.params["sdlog"] - 1.30) < 0.05
    assert hits >= 24


def test_uniform_wins_on_uniform_sample():
    x = make_rng(4).uniform(2.0, 5.0, 500)
    assert select(x).best.family == "uniform"


def test_normal_wins_on_normal_sample():
    x = make_rng(5).normal(1.0, 2.0, 500)
    assert select(x).best.family == "normal"


def test_gamma_mle_matches_scipy():
    x = make_rng(6).gamma(2.5, 1 / 1.7, 400)
    f = fit(x, "gamma", "mle")
    a, _, scale = stats.gamma.fit(x, floc=0)
    assert f.params["shape"] == pytest.approx(a, rel=1e-4)
    assert f.params["rate"] == pytest.approx(1 / scale, rel=1e-4)


def test_weibull_mle_matches_scipy():
    x = make_rng(7).weibull(1.8, 400) * 3.0
    f = fit(x, "weibull", "mle")
    c, _, scale = stats.weibull_min.fit(x, floc=0)
    assert f.params["shape"] == pytest.approx(c, rel=1e-4)
    assert f.params["scale"] == pytest.approx(scale, rel=1e-4)


def test_normal_mme_equals_mle():
    x = make_rng(8).normal(size=100)
    a, b = fit(x, "normal", "mme"), fit(x, "normal", "mle")
    assert a.params == pytest.approx(b.params, abs=1e-14)
    assert a.bic == pytest.approx(b.bic, abs=1e-10)


def test_gamma_mme_matches_moments():
    x = make_rng(9).gamma(3.0, 2.0, 300)
    f = fit(x, "gamma", "mme")
    assert f.params["shape"] / f.params["rate"] == pytest.approx(x.mean(), rel=1e-12)
    assert f.params["shape"] / f.params["rate"] ** 2 == pytest.approx(x.var(), rel=1e-12)


def test_mge_and_mse_are_close_to_truth_on_large_sample():
    x = make_rng(10).normal(0.5, 1.5, 2000)
    for method in ("mge", "mse"):
        p = fit(x, "normal", method).params
        assert abs(p["mean"] - 0.5) < 0.1 and abs(p["sd"] - 1.5) < 0.1


def test_bic_formula():
    x = make_rng(11).normal(size=50)
    f = fit(x, "normal", "mle")
    assert f.bic == pytest.approx(2 * np.log(50) - 2 * stats.norm(x.mean(), x.std()).logpdf(x).sum(), abs=1e-9)


def test_support_violation():
    with pytest.raises(FitError):
        fit(np.array([-1.0, 1, 2, 3, 4]), "lognormal")


def test_select_skips_inadmissible():
    x = make_rng(12).normal(size=60)
    sel = select(x)
    skipped = {(f, m) for f, m, _ in sel.skipped}
    assert ("lognormal", "mle") in skipped
    assert ("cauchy", "mme") in skipped
    bics = [f.bic for f in sel]
    assert bics == sorted(bics)


def test_student_t_df_bounded():
    x = make_rng(13).standard_t(3, 500)
    f = fit(x, "student_t", "mle")
    assert 2.01 <= f.params["df"] <= 200
    assert 2 < f.params["df"] < 6
