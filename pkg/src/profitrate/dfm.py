"""Dynamic factor model with VAR(p) factors, estimated by EM around a Kalman smoother.

Observation and state equations::

    x_t = Lambda f_t + e_t,                e_t ~ N(0, diag(R))
    f_t = A_1 f_{t-1} + ... + A_p f_{t-p} + u_t,   u_t ~ N(0, Q)

The state vector stacks ``(f_t, ..., f_{t-p+1})``.  Parameters start from
principal components; the initial state distribution is set from those
starting values and then held fixed, which keeps every M-step an exact
conditional maximisation and the log-likelihood monotone.  Missing cells
(NaN) are skipped casewise in the filter and in the loading/variance updates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .core import InsufficientDataError, NumericalError, ProfitRateError, as_finite_array

__all__ = [
    "DfmSpec",
    "DfmFit",
    "KalmanOutput",
    "kalman_filter",
    "kalman_smoother",
    "pc_p3_table",
    "select_factor_count",
    "select_lag_order",
    "fit_dfm",
    "dfm_relevance",
]

R_FLOOR = 1e-8


@dataclass(frozen=True)
class DfmSpec:
    factor_count: int = 2
    lag_order: int = 1
    max_em_iterations: int = 500
    em_tolerance: float = 1e-4
    allow_large_r: bool = False

    def __post_init__(self):
        if self.factor_count < 1:
            raise ProfitRateError("factor_count must be at least 1")
        if self.lag_order < 1:
            raise ProfitRateError("lag_order must be at least 1")
        if self.factor_count > 6 and not self.allow_large_r:
            raise ProfitRateError("more than 6 factors needs allow_large_r=True")
        if self.max_em_iterations < 1 or not self.em_tolerance > 0:
            raise ProfitRateError("invalid EM settings")


# ---------------------------------------------------------------- Kalman

@dataclass
class KalmanOutput:
    predicted_mean: np.ndarray  # T x m, a_{t|t-1}
    predicted_cov: np.ndarray  # T x m x m
    filtered_mean: np.ndarray  # T x m, a_{t|t}
    filtered_cov: np.ndarray
    loglik: float


def kalman_filter(Y, Z, T, H, Q, a1, P1) -> KalmanOutput:
    """Filter for ``y_t = Z s_t + eps_t``, ``s_{t+1} = T s_t + eta_t`` with ``s_1 ~ N(a1, P1)``.

    ``H`` and ``Q`` are the observation and state noise covariances.  NaN
    entries of ``Y`` (T x N) are dropped from that period's update.
    """
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    n, _ = Y.shape
    m = T.shape[0]
    a = np.asarray(a1, dtype=float).copy()
    P = np.asarray(P1, dtype=float).copy()
    am = np.empty((n, m))
    Pm = np.empty((n, m, m))
    af = np.empty((n, m))
    Pf = np.empty((n, m, m))
    ll = 0.0
    for t in range(n):
        am[t], Pm[t] = a, P
        obs = ~np.isnan(Y[t])
        if obs.any():
            Zt = Z[obs]
            v = Y[t, obs] - Zt @ a
            F = Zt @ P @ Zt.T + H[np.ix_(obs, obs)]
            F = 0.5 * (F + F.T)
            try:
                c = linalg.cho_factor(F, lower=True)
            except linalg.LinAlgError as exc:
                raise NumericalError("innovation covariance is not positive definite") from exc
            Finv_v = linalg.cho_solve(c, v)
            K = linalg.cho_solve(c, Zt @ P).T  # P Z' F^{-1}
            logdet = 2.0 * np.sum(np.log(np.diag(c[0])))
            ll += -0.5 * (obs.sum() * np.log(2 * np.pi) + logdet + v @ Finv_v)
            a = a + K @ v
            P = P - K @ Zt @ P
            P = 0.5 * (P + P.T)
        af[t], Pf[t] = a, P
        a = T @ a
        P = T @ P @ T.T + Q
    return KalmanOutput(am, Pm, af, Pf, float(ll))


def kalman_smoother(out: KalmanOutput, T: np.ndarray):
    """Rauch-Tung-Striebel smoother.

    Returns smoothed means (n x m), covariances (n x m x m) and lag-one
    covariances ``Cov(s_t, s_{t-1} | Y)`` (entry 0 unused).
    """
    n, m = out.filtered_mean.shape
    xs = out.filtered_mean.copy()
    Ps = out.filtered_cov.copy()
    lag1 = np.zeros((n, m, m))
    for t in range(n - 2, -1, -1):
        Pp = out.predicted_cov[t + 1]
        J = linalg.solve(Pp, T @ out.filtered_cov[t], assume_a="pos").T
        xs[t] = out.filtered_mean[t] + J @ (xs[t + 1] - out.predicted_mean[t + 1])
        Ps[t] = out.filtered_cov[t] + J @ (Ps[t + 1] - Pp) @ J.T
        Ps[t] = 0.5 * (Ps[t] + Ps[t].T)
        lag1[t + 1] = Ps[t + 1] @ J.T
    return xs, Ps, lag1


# ---------------------------------------------------------------- factor and lag selection

@dataclass
class FactorCountTable:
    k: np.ndarray
    V: np.ndarray
    sigma2_hat: float
    c_nt2: float
    pc_p3: np.ndarray
    selected: int


def pc_p3_table(X, k_max: int) -> FactorCountTable:
    """Bai-Ng ``PC_p3(k) = V(k) + k sigma2 ln(C^2) / C^2`` for ``k = 1..k_max``.

    ``V(k)`` is the mean squared residual of the rank-``k`` principal
    component fit, ``sigma2 = V(k_max)`` and ``C^2 = min(N, T)``.
    """
    X = as_finite_array(X, "X")
    Tn, N = X.shape
    if not 1 <= k_max < min(N, Tn):
        raise ProfitRateError(f"k_max must satisfy 1 <= k_max < min(N, T) = {min(N, Tn)}")
    sv2 = np.linalg.svd(X, compute_uv=False) ** 2
    total = sv2.sum()
    ks = np.arange(1, k_max + 1)
    V = np.array([max(total - sv2[:k].sum(), 0.0) for k in ks]) / (N * Tn)
    sigma2 = V[-1]
    c2 = float(min(N, Tn))
    pc = V + ks * sigma2 * np.log(c2) / c2
    return FactorCountTable(ks, V, float(sigma2), c2, pc, int(ks[np.argmin(pc)]))


def select_factor_count(X, k_max: int) -> tuple[int, FactorCountTable]:
    table = pc_p3_table(X, k_max)
    return table.selected, table


@dataclass
class LagSelection:
    p: np.ndarray
    criteria: dict[str, np.ndarray]
    selected: dict[str, int]


def _var_design(Y: np.ndarray, p: int, start: int):
    cols = [np.ones(Y.shape[0] - start)]
    for j in range(1, p + 1):
        cols.append(Y[start - j:Y.shape[0] - j])
    return np.column_stack(cols), Y[start:]


def select_lag_order(Y, p_max: int) -> LagSelection:
    """AIC, HQ, SC and FPE for VAR(p), p = 1..p_max, on a common estimation sample."""
    Y = as_finite_array(Y, "series")
    if Y.ndim == 1:
        Y = Y[:, None]
    n, K = Y.shape
    if p_max < 1:
        raise ProfitRateError("p_max must be at least 1")
    sample = n - p_max
    if sample - (p_max * K + 1) < 1:
        raise InsufficientDataError("too few observations for the requested maximum lag")
    crit = {c: np.empty(p_max) for c in ("AIC", "HQ", "SC", "FPE")}
    for i, p in enumerate(range(1, p_max + 1)):
        X, Yt = _var_design(Y, p, p_max)
        B, *_ = np.linalg.lstsq(X, Yt, rcond=None)
        E = Yt - X @ B
        sigma = E.T @ E / sample
        sign, logdet = np.linalg.slogdet(sigma)
        if sign <= 0:
            logdet = -np.inf
        npar = p * K * K + K
        crit["AIC"][i] = logdet + 2.0 * npar / sample
        crit["HQ"][i] = logdet + 2.0 * np.log(np.log(sample)) * npar / sample
        crit["SC"][i] = logdet + np.log(sample) * npar / sample
        crit["FPE"][i] = ((sample + p * K + 1) / (sample - p * K - 1)) ** K * np.exp(logdet)
    ps = np.arange(1, p_max + 1)
    return LagSelection(ps, crit, {c: int(ps[np.argmin(v)]) for c, v in crit.items()})


# ---------------------------------------------------------------- EM estimation

@dataclass
class DfmFit:
    loadings: np.ndarray  # N x r
    var_coefs: list[np.ndarray]  # p matrices r x r
    factor_cov: np.ndarray  # r x r innovation covariance
    factors: np.ndarray  # T x r smoothed
    idiosyncratic_var: np.ndarray  # N
    loglik_trace: list[float]
    iterations: int
    converged: bool
    per_series_r2: np.ndarray
    series: list[str] = field(default_factory=list)

    @property
    def r2_summary(self) -> dict[str, float]:
        return {"mean": float(np.mean(self.per_series_r2)), "median": float(np.median(self.per_series_r2))}


def _companion(A_list: list[np.ndarray]) -> np.ndarray:
    r = A_list[0].shape[0]
    p = len(A_list)
    Tm = np.zeros((r * p, r * p))
    Tm[:r] = np.hstack(A_list)
    if p > 1:
        Tm[r:, :-r] = np.eye(r * (p - 1))
    return Tm


def _stationary_cov(Tm: np.ndarray, Qm: np.ndarray) -> np.ndarray:
    if np.max(np.abs(np.linalg.eigvals(Tm))) < 0.999:
        P = linalg.solve_discrete_lyapunov(Tm, Qm)
        return 0.5 * (P + P.T)
    return 10.0 * np.eye(Tm.shape[0])


def _pca_start(X: np.ndarray, r: int, p: int):
    Xf = np.where(np.isnan(X), 0.0, X)
    _, _, Vt = np.linalg.svd(Xf, full_matrices=False)
    Lam = Vt[:r].T
    F = Xf @ Lam
    E = X - F @ Lam.T
    R = np.maximum(np.nanvar(E, axis=0), R_FLOOR)
    Ylag = np.column_stack([F[p - j - 1:F.shape[0] - j - 1] for j in range(p)])
    B, *_ = np.linalg.lstsq(Ylag, F[p:], rcond=None)
    U = F[p:] - Ylag @ B
    Q = U.T @ U / U.shape[0] + 1e-8 * np.eye(r)
    A_list = [B[j * r:(j + 1) * r].T for j in range(p)]
    return Lam, R, A_list, Q


def _relative_change(new: float, old: float) -> float:
    return abs(new - old) / max((abs(new) + abs(old)) / 2.0, 1e-12)


def fit_dfm(X, spec: DfmSpec = DfmSpec(), seed: int = 0, series=None) -> DfmFit:
    """EM estimation.  ``X`` should be standardised (T x N); NaN marks missing cells.

    ``seed`` is accepted for interface stability: the PCA start makes the
    estimator deterministic.
    """
    X = np.asarray(X, dtype=float)
    if np.isinf(X).any():
        raise ProfitRateError("X contains infinite values")
    Tn, N = X.shape
    r, p = spec.factor_count, spec.lag_order
    if not r < min(N, Tn):
        raise ProfitRateError(f"factor_count must be below min(N, T) = {min(N, Tn)}")
    if Tn - p < 2 * r + 2:
        raise InsufficientDataError("too few observations for the requested factors and lags")
    obs = ~np.isnan(X)
    Xz = np.where(obs, X, 0.0)
    Lam, R, A_list, Q = _pca_start(X, r, p)
    m = r * p
    Tm = _companion(A_list)
    Qm = np.zeros((m, m))
    Qm[:r, :r] = Q
    a1 = np.zeros(m)
    P1 = _stationary_cov(Tm, Qm)

    trace: list[float] = []
    converged = False
    it = 0
    for it in range(1, spec.max_em_iterations + 1):
        Z = np.zeros((N, m))
        Z[:, :r] = Lam
        out = kalman_filter(X, Z, Tm, np.diag(R), Qm, a1, P1)
        if not np.isfinite(out.loglik):
            raise NumericalError("non-finite log-likelihood")
        trace.append(out.loglik)
        if len(trace) > 1 and _relative_change(trace[-1], trace[-2]) < spec.em_tolerance:
            converged = True
            break
        xs, Ps, lag1 = kalman_smoother(out, Tm)
        f = xs[:, :r]
        Eff = np.einsum("ti,tj->tij", f, f) + Ps[:, :r, :r]
        # loadings and idiosyncratic variances, series by series over observed periods
        for i in range(N):
            ti = obs[:, i]
            S_ff = Eff[ti].sum(axis=0)
            S_xf = Xz[ti, i] @ f[ti]
            lam = linalg.solve(S_ff, S_xf, assume_a="pos")
            Lam[i] = lam
            resid = Xz[ti, i] - f[ti] @ lam
            R[i] = max((resid @ resid + np.einsum("j,tjk,k->", lam, Ps[ti, :r, :r], lam)) / ti.sum(), R_FLOOR)
        # factor VAR
        S_prev = np.einsum("ti,tj->ij", xs[:-1], xs[:-1]) + Ps[:-1].sum(axis=0)
        S_cross = np.einsum("ti,tj->ij", f[1:], xs[:-1]) + lag1[1:, :r, :].sum(axis=0)
        S_cur = Eff[1:].sum(axis=0)
        A_top = linalg.solve(S_prev, S_cross.T, assume_a="pos").T
        Q = (S_cur - A_top @ S_cross.T) / (Tn - 1)
        Q = 0.5 * (Q + Q.T)
        Tm[:r] = A_top
        Qm[:r, :r] = Q

    Z = np.zeros((N, m))
    Z[:, :r] = Lam
    out = kalman_filter(X, Z, Tm, np.diag(R), Qm, a1, P1)
    xs, _, _ = kalman_smoother(out, Tm)
    F = xs[:, :r]
    # sign convention: largest-magnitude loading in each column is positive
    s = np.sign(Lam[np.argmax(np.abs(Lam), axis=0), np.arange(r)])
    s[s == 0] = 1.0
    Lam = Lam * s
    F = F * s
    A_list = [s[:, None] * Tm[:r, j * r:(j + 1) * r] * s[None, :] for j in range(p)]
    Q = s[:, None] * Qm[:r, :r] * s[None, :]
    E = X - F @ Lam.T
    var_x = np.nanvar(X, axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        r2 = np.where(var_x > 0, 1.0 - np.nanvar(E, axis=0) / var_x, 0.0)
    r2 = np.clip(r2, 0.0, 1.0)
    names = list(series) if series is not None else [f"V{i + 1}" for i in range(N)]
    return DfmFit(Lam, A_list, Q, F, R.copy(), trace, it, converged, r2, names)


def dfm_relevance(fit: DfmFit, threshold: float = 1.0, atol: float = 1e-6) -> list[tuple[str, float, bool]]:
    """Per-series communality relative to the cross-series mean; flagged below ``threshold``.

    ``score_i = R2_i / mean(R2)`` so the average series scores one.  Scores
    within ``atol`` of the threshold are not flagged.
    """
    r2 = fit.per_series_r2
    mean = float(r2.mean())
    scores = r2 / mean if mean > 0 else np.zeros_like(r2)
    return [(name, float(sc), bool(sc < threshold - atol)) for name, sc in zip(fit.series, scores)]
