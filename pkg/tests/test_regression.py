import itertools

import numpy as np
import pytest
import statsmodels.api as sm

from profitrate.core import InsufficientDataError, make_rng
from profitrate.regression import (RankDeficientError, backward_eliminate, cox_snell_r2, glm_fit, glm_irls,
                                   validate, vif)


def six_predictor_fixture(seed=7, n=60):
    rng = make_rng(seed)
    X = rng.standard_normal((n, 6))
    y = 1 + 2 * X[:, 0] - 1.5 * X[:, 2] + 0.3 * X[:, 4] + rng.standard_normal(n)
    return y, X


def exhaustive_best(y, X):
    best = None
    for k in range(X.shape[1] + 1):
        for cols in itertools.combinations(range(X.shape[1]), k):
            aic = glm_fit(y, X[:, list(cols)]).aic
            if best is None or aic < best[0]:
                best = (aic, cols)
    return best


def test_two_predictor_normal_equations():
    X = np.array([[1.0, 2.0], [2.0, 0.5], [3.0, 1.0], [4.0, 3.0], [5.0, 2.5], [6.0, 0.0]])
    y = np.array([2.1, 2.9, 4.2, 6.8, 7.1, 6.9])
    D = np.column_stack([np.ones(6), X])
    beta = np.linalg.solve(D.T @ D, D.T @ y)
    got = np.array(list(glm_fit(y, X).coefficients.values()))
    assert np.max(np.abs(got - beta)) < 1e-10


def test_exact_fit():
    x = np.arange(10.0)
    f = glm_fit(3 - 2 * x, x[:, None])
    assert f.coefficients["(Intercept)"] == pytest.approx(3.0, abs=1e-12)
    assert f.coefficients["V1"] == pytest.approx(-2.0, abs=1e-12)
    assert np.max(np.abs(f.fitted - (3 - 2 * x))) < 1e-12


def test_intercept_only_is_mean(rng):
    y = rng.standard_normal(20)
    f = glm_fit(y, np.empty((20, 0)))
    assert f.coefficients["(Intercept)"] == pytest.approx(y.mean(), abs=1e-14)


def test_glm_equals_ols_two_solvers():
    y, X = six_predictor_fixture()
    qr = np.array(list(glm_fit(y, X).coefficients.values()))
    irls = np.array(list(glm_irls(y, X).values()))
    lstsq = np.linalg.lstsq(np.column_stack([np.ones(len(y)), X]), y, rcond=None)[0]
    assert np.max(np.abs(qr - lstsq)) < 1e-10
    assert np.max(np.abs(irls - lstsq)) < 1e-10


def test_aic_counts_dispersion():
    y, X = six_predictor_fixture()
    ours = glm_fit(y, X)
    ref = sm.GLM(y, sm.add_constant(X)).fit()
    assert ours.loglik == pytest.approx(ref.llf, abs=1e-9)
    assert ours.aic == pytest.approx(2 * 8 - 2 * ref.llf, abs=1e-9)


def test_rank_deficiency_lists_columns(rng):
    X = rng.standard_normal((20, 2))
    X = np.column_stack([X, X[:, 0] + X[:, 1]])
    with pytest.raises(RankDeficientError, match="c"):
        glm_fit(rng.standard_normal(20), X, ["a", "b", "c"])


def test_too_few_rows():
    with pytest.raises(InsufficientDataError):
        glm_fit(np.arange(3.0), np.ones((3, 3)) * np.arange(3.0)[:, None] ** np.arange(3))


def test_elimination_matches_exhaustive_search():
    y, X = six_predictor_fixture()
    trace = backward_eliminate(y, X)
    best_aic, best_cols = exhaustive_best(y, X)
    assert trace.surviving == [f"V{j + 1}" for j in best_cols]
    assert trace.final.aic == pytest.approx(best_aic, abs=1e-10)


def test_elimination_trace_strictly_decreasing():
    y, X = six_predictor_fixture()
    trace = backward_eliminate(y, X)
    assert trace.steps
    for s in trace.steps:
        assert s.aic_after < s.aic_before
    assert trace.steps[0].aic_before == trace.full_aic
    for a, b in zip(trace.steps, trace.steps[1:]):
        assert b.aic_before == a.aic_after


def test_noise_predictor_dropped():
    rng = make_rng(3)
    X = rng.standard_normal((50, 2))
    y = 3 + X @ [1.0, -2.0] + 1e-3 * rng.standard_normal(50)
    Xn = np.column_stack([X, rng.standard_normal(50)])
    trace = backward_eliminate(y, Xn, ["a", "b", "noise"])
    assert trace.dropped == ["noise"]
    assert trace.surviving == ["a", "b"]


def test_codes_are_positions():
    y, X = six_predictor_fixture()
    names = [f"s{i}" for i in range(6)]
    trace = backward_eliminate(y, X, names)
    for code, name in trace.codes(names):
        assert code == f"V{names.index(name) + 1}"


def test_validation_exact_fit(rng):
    X = rng.standard_normal((40, 2))
    y = 1 + X @ [0.5, 2.0]
    rep = validate(y, X, seed=1)
    assert rep.train_mae < 1e-10 and rep.test_mae < 1e-10
    assert rep.pseudo_r2 == pytest.approx(1.0, abs=1e-9)


def test_validation_partition_and_determinism():
    y, X = six_predictor_fixture()
    a, b = validate(y, X, seed=5), validate(y, X, seed=5)
    assert a.train_mae == b.train_mae and a.test_mae == b.test_mae
    idx = np.concatenate([a.train_index, a.test_index])
    assert np.array_equal(np.sort(idx), np.arange(len(y)))
    assert a.train_index.size == 48


def test_validation_hand_rerun():
    y, X = six_predictor_fixture()
    rep = validate(y, X, seed=5)
    tr, te = rep.train_index, rep.test_index
    D = np.column_stack([np.ones(len(y)), X])
    beta = np.linalg.lstsq(D[tr], y[tr], rcond=None)[0]
    assert rep.train_mae == pytest.approx(np.mean(np.abs(y[tr] - D[tr] @ beta)), abs=1e-12)
    assert rep.test_mae == pytest.approx(np.mean(np.abs(y[te] - D[te] @ beta)), abs=1e-12)


def test_validation_small_partition():
    y, X = six_predictor_fixture(n=20)
    with pytest.raises(InsufficientDataError):
        validate(y, X, seed=0)


def test_cox_snell_equals_r_squared():
    y, X = six_predictor_fixture()
    f = glm_fit(y, X)
    r2 = 1 - f.rss / np.sum((y - y.mean()) ** 2)
    assert cox_snell_r2(f, y) == pytest.approx(r2, abs=1e-12)


def test_vif_duplicate_columns_infinite(rng):
    x = rng.standard_normal(30)
    v = vif(np.column_stack([x, x, rng.standard_normal(30)]), ["a", "b", "c"])
    assert np.isinf(v["a"]) and np.isinf(v["b"])
    assert 1.0 <= v["c"] < 1.5


def test_vif_matches_statsmodels(rng):
    from statsmodels.stats.outliers_influence import variance_inflation_factor
    X = rng.standard_normal((40, 3))
    X[:, 2] += 0.8 * X[:, 0]
    D = sm.add_constant(X)
    ours = vif(X)
    for j in range(3):
        assert ours[f"V{j + 1}"] == pytest.approx(variance_inflation_factor(D, j + 1), rel=1e-10)
