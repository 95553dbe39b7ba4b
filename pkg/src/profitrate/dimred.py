"""PCA and SVD of the years x sectors rate matrix, and sector selection from contributions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import distfit
from .core import InsufficientDataError, ProfitRateError, as_finite_array, standardize_columns

__all__ = ["PcaResult", "SvdResult", "pca", "retained_count", "svd_relevance", "select_sectors"]


@dataclass
class PcaResult:
    eigenvalues: np.ndarray
    explained_variance_pct: np.ndarray
    loadings: np.ndarray  # variables x components, eigenvectors scaled by sqrt(eigenvalue)
    contributions_pct: np.ndarray  # variables x components, columns sum to 100
    scores: np.ndarray  # observations x components
    retained: int
    variables: list[str] = field(default_factory=list)

    @property
    def cumulative_pct(self) -> np.ndarray:
        return np.cumsum(self.explained_variance_pct)

    def contribution_table(self, components: int | None = None) -> list[dict]:
        k = self.retained if components is None else components
        return [
            {"sector": v, **{f"Dim{c + 1}": float(self.contributions_pct[i, c]) for c in range(k)}}
            for i, v in enumerate(self.variables)
        ]


def retained_count(eigenvalues: np.ndarray, low: float = 70.0, high: float = 90.0) -> int:
    """Components kept by the eigenvalue > 1 rule within the 70-90 % variance band.

    Start from the components with eigenvalue above one; extend while the
    cumulative share is below ``low``, and trim trailing components whose
    predecessor already exceeds ``high``.
    """
    ev = np.asarray(eigenvalues, dtype=float)
    total = ev.sum()
    cum = 100.0 * np.cumsum(ev) / total
    k = int(np.count_nonzero(ev > 1.0))
    k = max(k, 1)
    while k < ev.size and cum[k - 1] < low:
        k += 1
    while k > 1 and cum[k - 2] > high:
        k -= 1
    return k


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def pca(matrix, standardize: bool = True, variables: Sequence[str] | None = None) -> PcaResult:
    """Eigen-decomposition of the correlation (or covariance) matrix; rows are observations."""
    X = as_finite_array(matrix, "matrix")
    if X.ndim != 2:
        raise ProfitRateError("PCA needs a 2-D observations x variables matrix")
    n, p = X.shape
    if p < 2 or n < 3:
        raise InsufficientDataError("PCA needs at least 2 variables and 3 observations")
    names = list(variables) if variables is not None else [f"V{i + 1}" for i in range(p)]
    Z = standardize_columns(X, names) if standardize else X - X.mean(axis=0)
    C = Z.T @ Z / (n - 1)
    ev, vec = np.linalg.eigh(C)
    order = np.argsort(ev)[::-1]
    ev = np.clip(ev[order], 0.0, None)
    vec = _fix_signs(vec[:, order])
    explained = 100.0 * ev / ev.sum()
    contrib = 100.0 * vec**2
    loadings = vec * np.sqrt(ev)
    return PcaResult(ev, explained, loadings, contrib, Z @ vec, retained_count(ev), names)


@dataclass
class SvdResult:
    singular_values: np.ndarray
    quantile_cut: float
    relevant_count: int
    quantiles: np.ndarray  # the 19 cut points of the 20-quantile split
    fit: distfit.DistributionFit | None = None
    note: str = ""


def svd_relevance(matrix, standardize: bool = True, families=distfit.FAMILIES, methods=distfit.METHODS,
                  top_fraction: float = 0.10) -> SvdResult:
    """Singular values beyond the fitted distribution's upper-decile cut.

    The best-BIC distribution over ``families`` x ``methods`` is fitted to
    the non-zero singular values of the centred (optionally standardised)
    matrix; values above its ``1 - top_fraction`` quantile are relevant.
    """
    X = as_finite_array(matrix, "matrix")
    if X.ndim != 2 or X.shape[1] < 2 or X.shape[0] < 3:
        raise InsufficientDataError("SVD relevance needs at least 2 variables and 3 observations")
    Z = standardize_columns(X) if standardize else X - X.mean(axis=0)
    sv = np.linalg.svd(Z, compute_uv=False)
    tol = sv.max() * max(Z.shape) * np.finfo(float).eps
    positive = sv[sv > tol]
    if positive.size < 5:
        # too few non-zero values to fit a distribution; every non-zero value is relevant
        return SvdResult(sv, float(tol), int(positive.size), np.full(19, np.nan), None,
                         "fewer than 5 non-zero singular values")
    sel = distfit.select(positive, families, methods)
    best = sel.best
    qs = best.quantile(np.arange(1, 20) / 20.0)
    cut = float(best.quantile(1.0 - top_fraction))
    return SvdResult(sv, cut, int(np.count_nonzero(sv > cut)), np.asarray(qs), best)


def select_sectors(result: PcaResult, mode: str = "weighted", threshold: float = 1.0) -> list[tuple[str, float, bool]]:
    """Average contribution over the retained components; below ``threshold`` is flagged.

    ``simple`` takes the plain mean over retained components; ``weighted``
    weights each component by its share of the retained explained variance.
    """
    k = result.retained
    if k < 1:
        raise ProfitRateError("no retained components")
    contrib = result.contributions_pct[:, :k]
    if mode == "simple":
        scores = contrib.mean(axis=1)
    elif mode == "weighted":
        w = result.explained_variance_pct[:k] / result.explained_variance_pct[:k].sum()
        scores = contrib @ w
    else:
        raise ProfitRateError(f"unknown selection mode {mode!r}")
    return [(v, float(s), bool(s < threshold)) for v, s in zip(result.variables, scores)]
