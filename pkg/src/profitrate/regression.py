"""Gaussian-identity GLM, AIC backward elimination, hold-out validation and VIFs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import InsufficientDataError, ProfitRateError, as_finite_array, make_rng

__all__ = ["GlmFit", "EliminationStep", "EliminationTrace", "ValidationReport", "RankDeficientError",
           "glm_fit", "glm_irls", "backward_eliminate", "validate", "vif"]


class RankDeficientError(ProfitRateError):
    pass


@dataclass
class GlmFit:
    """Gaussian family, identity link.  ``aic = 2k - 2 loglik`` with ``k`` counting the dispersion."""

    coefficients: dict[str, float]
    loglik: float
    dispersion: float  # MLE residual variance, RSS / n
    fitted: np.ndarray
    rss: float
    n: int

    @property
    def k(self) -> int:
        return len(self.coefficients) + 1

    @property
    def aic(self) -> float:
        return 2 * self.k - 2 * self.loglik


def _design(X, names: Sequence[str] | None, intercept: bool):
    X = as_finite_array(X, "X")
    if X.ndim == 1:
        X = X[:, None]
    names = list(names) if names is not None else [f"V{i + 1}" for i in range(X.shape[1])]
    if len(names) != X.shape[1]:
        raise ProfitRateError("one name per predictor column required")
    if intercept:
        X = np.column_stack([np.ones(X.shape[0]), X])
        names = ["(Intercept)"] + names
    return X, names


def _gaussian_loglik(rss: float, n: int) -> float:
    if rss <= 0:
        return np.inf
    return -0.5 * n * (np.log(2 * np.pi * rss / n) + 1.0)


def _dependent_columns(X: np.ndarray, names: list[str]) -> list[str]:
    # greedy: a column is dependent if it adds no rank to the columns before it
    dep, kept = [], []
    for j in range(X.shape[1]):
        trial = kept + [j]
        if np.linalg.matrix_rank(X[:, trial]) < len(trial):
            dep.append(names[j])
        else:
            kept.append(j)
    return dep


def glm_fit(y, X, names: Sequence[str] | None = None, intercept: bool = True) -> GlmFit:
    """Least-squares fit, reported with the Gaussian likelihood at the MLE dispersion."""
    y = as_finite_array(y, "y").ravel()
    D, cols = _design(X, names, intercept)
    n, p = D.shape
    if y.size != n:
        raise ProfitRateError("y and X have different numbers of rows")
    if n <= p:
        raise InsufficientDataError(f"{n} observations cannot identify {p} coefficients")
    if np.linalg.matrix_rank(D) < p:
        raise RankDeficientError(f"rank-deficient design; dependent columns: {', '.join(_dependent_columns(D, cols))}")
    Q, R = np.linalg.qr(D)
    beta = np.linalg.solve(R, Q.T @ y)
    fitted = D @ beta
    resid = y - fitted
    rss = float(resid @ resid)
    if rss < 1e-28 * max(float(y @ y), 1e-300):
        rss = 0.0
    return GlmFit(dict(zip(cols, map(float, beta))), _gaussian_loglik(rss, n), rss / n, fitted, rss, n)


def glm_irls(y, X, names: Sequence[str] | None = None, intercept: bool = True, tol: float = 1e-14,
             max_iter: int = 50) -> dict[str, float]:
    """Coefficients by iteratively reweighted least squares via the normal equations.

    With the identity link and unit variance function the working weights are
    constant, so this converges in one step; kept as an independent route to
    the same estimates.
    """
    y = as_finite_array(y, "y").ravel()
    D, cols = _design(X, names, intercept)
    beta = np.zeros(D.shape[1])
    eta = D @ beta
    for _ in range(max_iter):
        mu = eta  # identity link
        z = eta + (y - mu)  # working response, d eta / d mu = 1
        w = np.ones_like(y)  # 1 / (V(mu) g'(mu)^2)
        A = D.T @ (w[:, None] * D)
        new = np.linalg.solve(A, D.T @ (w * z))
        if np.max(np.abs(new - beta)) <= tol * max(1.0, np.max(np.abs(new))):
            beta = new
            break
        beta = new
        eta = D @ beta
    return dict(zip(cols, map(float, beta)))


@dataclass
class EliminationStep:
    dropped: str
    aic_before: float
    aic_after: float


@dataclass
class EliminationTrace:
    steps: list[EliminationStep]
    surviving: list[str]
    dropped: list[str]
    final: GlmFit
    full_aic: float

    def codes(self, all_names: Sequence[str]) -> list[tuple[str, str]]:
        """(``V{position}``, name) for each dropped predictor, positions 1-based in ``all_names``."""
        pos = {n: i + 1 for i, n in enumerate(all_names)}
        return sorted(((f"V{pos[d]}", d) for d in self.dropped), key=lambda t: int(t[0][1:]))


def backward_eliminate(y, X, names: Sequence[str] | None = None) -> EliminationTrace:
    """Greedy single-drop elimination on AIC; the intercept is never dropped.

    Each step removes the predictor whose deletion gives the lowest AIC,
    provided that AIC is strictly below the current one.  Ties go to the
    earlier column.
    """
    X = as_finite_array(X, "X")
    if X.ndim == 1:
        X = X[:, None]
    names = list(names) if names is not None else [f"V{i + 1}" for i in range(X.shape[1])]
    active = list(range(X.shape[1]))
    current = glm_fit(y, X[:, active], [names[i] for i in active])
    full_aic = current.aic
    steps = []
    while active:
        best = None
        for pos, j in enumerate(active):
            trial = active[:pos] + active[pos + 1:]
            f = glm_fit(y, X[:, trial], [names[i] for i in trial])
            if best is None or f.aic < best[1].aic:
                best = (j, f)
        j, f = best
        if not f.aic < current.aic:
            break
        steps.append(EliminationStep(names[j], current.aic, f.aic))
        active.remove(j)
        current = f
    surviving = [names[i] for i in active]
    dropped = [s.dropped for s in steps]
    return EliminationTrace(steps, surviving, dropped, current, full_aic)


def _r2_on_others(X: np.ndarray, j: int) -> float:
    others = np.delete(X, j, axis=1)
    D = np.column_stack([np.ones(X.shape[0]), others])
    beta, *_ = np.linalg.lstsq(D, X[:, j], rcond=None)
    resid = X[:, j] - D @ beta
    tss = float(np.sum((X[:, j] - X[:, j].mean()) ** 2))
    if tss == 0:
        return 1.0
    return 1.0 - float(resid @ resid) / tss


def vif(X, names: Sequence[str] | None = None) -> dict[str, float]:
    """Variance inflation factors; perfectly collinear columns give ``inf``."""
    X = as_finite_array(X, "X")
    if X.ndim == 1:
        X = X[:, None]
    names = list(names) if names is not None else [f"V{i + 1}" for i in range(X.shape[1])]
    out = {}
    for j, name in enumerate(names):
        if X.shape[1] == 1:
            out[name] = 1.0
            continue
        r2 = _r2_on_others(X, j)
        out[name] = np.inf if r2 >= 1.0 - 1e-12 else 1.0 / (1.0 - r2)
    return out


@dataclass
class ValidationReport:
    split_seed: int
    train_fraction: float
    train_index: np.ndarray
    test_index: np.ndarray
    train_mae: float
    test_mae: float
    pseudo_r2: float
    vif: dict[str, float] = field(default_factory=dict)
    pseudo_r2_formula: str = "Cox-Snell: 1 - exp(-2 (loglik_model - loglik_null) / n)"

    def to_json(self) -> dict:
        return {
            "split_seed": self.split_seed,
            "train_fraction": self.train_fraction,
            "n_train": int(self.train_index.size),
            "n_test": int(self.test_index.size),
            "train_mae": self.train_mae,
            "test_mae": self.test_mae,
            "pseudo_r2": self.pseudo_r2,
            "pseudo_r2_formula": self.pseudo_r2_formula,
            "vif": {k: (v if np.isfinite(v) else "inf") for k, v in self.vif.items()},
        }


def cox_snell_r2(fit: GlmFit, y: np.ndarray) -> float:
    """Maximum-likelihood pseudo R^2.  Under the Gaussian likelihood it equals ``1 - RSS/TSS``."""
    tss = float(np.sum((y - y.mean()) ** 2))
    if tss == 0:
        raise ProfitRateError("response is constant")
    null_ll = _gaussian_loglik(tss, y.size)
    if not np.isfinite(fit.loglik):
        return 1.0
    return float(min(max(1.0 - np.exp(-2.0 * (fit.loglik - null_ll) / y.size), 0.0), 1.0))


def validate(y, X, seed: int, train_fraction: float = 0.8, names: Sequence[str] | None = None) -> ValidationReport:
    """Random train/test split, MAE on both parts, pseudo R^2 on the training fit, VIFs on all rows."""
    y = as_finite_array(y, "y").ravel()
    X = as_finite_array(X, "X")
    if X.ndim == 1:
        X = X[:, None]
    n, p = X.shape
    if not 0 < train_fraction < 1:
        raise ProfitRateError("train_fraction must lie in (0, 1)")
    n_train = int(round(train_fraction * n))
    if min(n_train, n - n_train) < p + 2:
        raise InsufficientDataError(f"partitions of {n_train} and {n - n_train} rows are too small for {p} predictors")
    perm = make_rng(seed).permutation(n)
    train, test = np.sort(perm[:n_train]), np.sort(perm[n_train:])
    fit = glm_fit(y[train], X[train], names)
    beta = np.array(list(fit.coefficients.values()))
    pred_test = np.column_stack([np.ones(test.size), X[test]]) @ beta
    return ValidationReport(
        seed, train_fraction, train, test,
        float(np.mean(np.abs(y[train] - fit.fitted))),
        float(np.mean(np.abs(y[test] - pred_test))),
        cox_snell_r2(fit, y[train]),
        vif(X, names),
    )
