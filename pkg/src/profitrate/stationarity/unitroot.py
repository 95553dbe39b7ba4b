"""ADF, ERS (DF-GLS and point-optimal), KPSS and Phillips-Perron tests."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import InsufficientDataError, ProfitRateError, TimeSeries, as_finite_array
from . import critical

__all__ = [
    "TestResult",
    "ols",
    "schwert_lags",
    "bandwidth",
    "long_run_variance",
    "adf",
    "dfgls",
    "ers_pt",
    "kpss",
    "pp",
]

# which side of the critical value rejects the null
LEFT, RIGHT = "left", "right"

_ADF_TREND = {"none": "n", "drift": "c", "drift_and_trend": "ct"}


@dataclass
class TestResult:
    """One statistic, its critical values, and per-level verdicts.

    ``null_is_unit_root`` is False only for KPSS.  ``verdict[level]`` is
    ``"stationary"`` when the evidence at that level favours stationarity:
    the unit-root null is rejected, or the stationarity null (KPSS) is not.
    """

    family: str
    variation: str
    statistic: float
    critical_values: dict[float, float]
    tail: str
    null_is_unit_root: bool = True
    lags: int = 0
    nobs: int = 0
    coefficients: dict = field(default_factory=dict)

    def rejects(self, level: float) -> bool:
        cv = self.critical_values[level]
        return self.statistic < cv if self.tail == LEFT else self.statistic > cv

    @property
    def verdict(self) -> dict[float, str]:
        out = {}
        for lvl in self.critical_values:
            stationary = self.rejects(lvl) if self.null_is_unit_root else not self.rejects(lvl)
            out[lvl] = "stationary" if stationary else "non_stationary"
        return out


@dataclass(frozen=True)
class OlsFit:
    beta: np.ndarray
    se: np.ndarray
    resid: np.ndarray
    ssr: float
    nobs: int
    k: int

    @property
    def tvalues(self) -> np.ndarray:
        return self.beta / self.se

    @property
    def aic(self) -> float:
        return self.nobs * np.log(self.ssr / self.nobs) + 2 * self.k


def ols(y: np.ndarray, X: np.ndarray) -> OlsFit:
    n, k = X.shape
    if n <= k:
        raise InsufficientDataError("too few observations for the test regression")
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ beta
    ssr = float(resid @ resid)
    s2 = ssr / (n - k)
    cov = s2 * np.linalg.inv(X.T @ X)
    return OlsFit(beta, np.sqrt(np.diag(cov)), resid, ssr, n, k)


def _values(series) -> np.ndarray:
    return series.values if isinstance(series, TimeSeries) else as_finite_array(series).ravel()


def schwert_lags(n: int, short: bool = False) -> int:
    """``floor(4 (n/100)^(1/4))`` (short) or ``floor(12 (n/100)^(1/4))``."""
    return int(np.floor((4.0 if short else 12.0) * (n / 100.0) ** 0.25))


def bandwidth(n: int, rule) -> int:
    if rule == "short":
        return schwert_lags(n, short=True)
    if rule == "long":
        return schwert_lags(n)
    if isinstance(rule, (int, np.integer)) and rule >= 0:
        return int(rule)
    raise ProfitRateError(f"unknown lag rule {rule!r}")


def long_run_variance(e: np.ndarray, lags: int) -> float:
    """Bartlett-weighted (Newey-West) long-run variance with divisor ``n``."""
    n = e.size
    s = float(e @ e) / n
    for j in range(1, lags + 1):
        s += 2.0 * (1.0 - j / (lags + 1.0)) * float(e[j:] @ e[:-j]) / n
    return s


def _deterministics(trend: str, t: np.ndarray) -> np.ndarray:
    cols = []
    if trend in ("c", "ct"):
        cols.append(np.ones_like(t, dtype=float))
    if trend == "ct":
        cols.append(t.astype(float))
    return np.column_stack(cols) if cols else np.empty((t.size, 0))


def _df_design(y: np.ndarray, lags: int, trend: str, start: int):
    """Dependent ``dy_t`` and regressors ``[y_{t-1}, dy_{t-1..t-lags}, det]`` for ``t >= start``."""
    dy = np.diff(y)
    idx = np.arange(start, y.size)  # positions t in y
    cols = [y[idx - 1]]
    for j in range(1, lags + 1):
        cols.append(dy[idx - 1 - j])
    X = np.column_stack(cols + [_deterministics(trend, idx + 1)])
    return dy[idx - 1], X


def _df_regression(y: np.ndarray, lags: int, trend: str, lag_rule, max_lag: int | None):
    """Fit the (augmented) DF regression; ``lag_rule='auto_aic'`` picks lags by AIC on a common sample."""
    n = y.size
    if lag_rule == "auto_aic":
        max_lag = schwert_lags(n) if max_lag is None else max_lag
        max_lag = max(0, min(max_lag, (n - 8) // 2))
        start = max_lag + 1
        aics = [ols(*_df_design(y, p, trend, start)).aic for p in range(max_lag + 1)]
        lags = int(np.argmin(aics))
    fit = ols(*_df_design(y, lags, trend, lags + 1))
    return fit, lags


def adf(series, spec: str = "drift", lag_rule="auto_aic", max_lag: int | None = None) -> TestResult:
    """Augmented Dickey-Fuller t-test.

    ``spec`` is ``none``, ``drift`` or ``drift_and_trend``; ``lag_rule`` is
    ``auto_aic`` (Schwert maximum, AIC choice), ``short``/``long`` (Schwert
    4/12 rule) or a fixed non-negative integer.
    """
    y = _values(series)
    if spec not in _ADF_TREND:
        raise ProfitRateError(f"unknown ADF spec {spec!r}")
    trend = _ADF_TREND[spec]
    n = y.size
    if lag_rule == "auto_aic":
        lags = None
    else:
        lags = bandwidth(n, lag_rule)
    if n - (lags or 0) - 2 < 5:
        raise InsufficientDataError("too few observations for ADF")
    fit, lags = _df_regression(y, lags or 0, trend, lag_rule, max_lag)
    stat = float(fit.tvalues[0])
    labels = {"none": "No Drift or Deterministic Trend", "drift": "Drift but No Deterministic Trend",
              "drift_and_trend": "Drift and Deterministic Trend"}
    return TestResult("ADF", labels[spec], stat, critical.tau_critical(trend, fit.nobs), LEFT, True, lags, fit.nobs,
                      {"gamma": float(fit.beta[0]), "ssr": fit.ssr})


def gls_detrend(y: np.ndarray, trend: str):
    """GLS-detrended series and quasi-difference SSRs ``S(alpha_bar)``, ``S(1)``."""
    T = y.size
    cbar = -7.0 if trend == "c" else -13.5
    abar = 1.0 + cbar / T
    z = _deterministics(trend, np.arange(1, T + 1))

    def quasi(a, v):
        out = v.copy()
        out[1:] = v[1:] - a * v[:-1]
        return out

    beta, *_ = np.linalg.lstsq(quasi(abar, z), quasi(abar, y), rcond=None)
    r = quasi(abar, y) - quasi(abar, z) @ beta
    s_abar = float(r @ r)
    b1, *_ = np.linalg.lstsq(quasi(1.0, z), quasi(1.0, y), rcond=None)
    r1 = quasi(1.0, y) - quasi(1.0, z) @ b1
    return y - z @ beta, s_abar, float(r1 @ r1), abar


def dfgls(series, trend: str = "c", lag_rule=0, max_lag: int | None = None) -> TestResult:
    """ERS DF-GLS t-test on the GLS-demeaned (``c``) or detrended (``ct``) series."""
    y = _values(series)
    if y.size < 20:
        raise InsufficientDataError("ERS tests need at least 20 observations")
    yd, *_ = gls_detrend(y, trend)
    lags = 0 if lag_rule == "auto_aic" else bandwidth(y.size, lag_rule)
    fit, lags = _df_regression(yd, lags, "n", lag_rule, max_lag)
    label = {"c": "Constant Mean", "ct": "Linear Trend"}[trend]
    return TestResult("ERS", label, float(fit.tvalues[0]), critical.dfgls_critical(trend, y.size), LEFT, True,
                      lags, fit.nobs, {"gamma": float(fit.beta[0])})


def ar_spectral_variance(y: np.ndarray, trend: str, lags: int) -> float:
    """ERS autoregressive estimate of the spectral density at zero."""
    fit = ols(*_df_design(y, lags, trend, lags + 1))
    s2 = fit.ssr / fit.nobs
    b = fit.beta[1:1 + lags].sum() if lags else 0.0
    return s2 / (1.0 - b) ** 2


def ers_pt(series, trend: str = "c", lag_rule=0, max_lag: int | None = None) -> TestResult:
    """ERS feasible point-optimal statistic ``(S(a) - a S(1)) / omega^2``; small values reject."""
    y = _values(series)
    if y.size < 20:
        raise InsufficientDataError("ERS tests need at least 20 observations")
    _, s_abar, s_one, abar = gls_detrend(y, trend)
    if lag_rule == "auto_aic":
        _, lags = _df_regression(y, 0, trend, "auto_aic", max_lag)
    else:
        lags = bandwidth(y.size, lag_rule)
    omega2 = ar_spectral_variance(y, trend, lags)
    stat = (s_abar - abar * s_one) / omega2
    label = {"c": "Constant Mean (P-test)", "ct": "Constant Mean and Linear Trend"}[trend]
    return TestResult("ERS", label, float(stat), critical.pt_critical(trend, y.size), LEFT, True, lags, y.size,
                      {"omega2": omega2})


def kpss(series, spec: str = "level", lag_rule="short") -> TestResult:
    """KPSS stationarity test; large statistics reject (trend-)stationarity."""
    y = _values(series)
    n = y.size
    if n < 10:
        raise InsufficientDataError("KPSS needs at least 10 observations")
    trend = {"level": "c", "trend": "ct"}.get(spec)
    if trend is None:
        raise ProfitRateError(f"unknown KPSS spec {spec!r}")
    X = _deterministics(trend, np.arange(1, n + 1))
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    e = y - X @ beta
    if float(e @ e) <= 1e-24 * max(1.0, float(y @ y)):
        raise ProfitRateError("degenerate regression")
    lags = bandwidth(n, lag_rule)
    S = np.cumsum(e)
    stat = float(S @ S) / (n * n * long_run_variance(e, lags))
    rule = lag_rule if isinstance(lag_rule, str) else "Fixed"
    label = f"{rule.capitalize()} Lags around a " + ("Random Walk" if spec == "level" else "Deterministic Trend")
    return TestResult("KPSS", label, stat, critical.kpss_critical(trend), RIGHT, False, lags, n)


def pp(series, form: str = "Z_t", lag_rule="short", model: str = "trend") -> TestResult:
    """Phillips-Perron Z(alpha) or Z(t) with Bartlett long-run variance.

    Test regression ``y_t = mu [+ beta t] + alpha y_{t-1} + u_t``.
    """
    y = _values(series)
    if y.size < 10:
        raise InsufficientDataError("PP needs at least 10 observations")
    if form not in ("Z_alpha", "Z_t"):
        raise ProfitRateError(f"unknown PP form {form!r}")
    trend = {"constant": "c", "trend": "ct"}[model]
    T = y.size - 1
    X = np.column_stack([y[:-1], _deterministics(trend, np.arange(2, y.size + 1))])
    fit = ols(y[1:], X)
    rho, se = fit.beta[0], fit.se[0]
    s2 = fit.ssr / (T - fit.k)
    gamma0 = fit.ssr / T
    lags = bandwidth(y.size, lag_rule)
    lam2 = long_run_variance(fit.resid, lags)
    if form == "Z_alpha":
        stat = T * (rho - 1.0) - 0.5 * (T * T * se * se / s2) * (lam2 - gamma0)
        cvs = critical.bias_critical(trend, T)
    else:
        t = (rho - 1.0) / se
        stat = np.sqrt(gamma0 / lam2) * t - 0.5 * (lam2 - gamma0) / np.sqrt(lam2) * (T * se / np.sqrt(s2))
        cvs = critical.tau_critical(trend, T)
    rule = lag_rule if isinstance(lag_rule, str) else "Fixed"
    label = f"{rule.capitalize()} Lags with {'Z(alpha)' if form == 'Z_alpha' else 'Z(t)'}"
    return TestResult("PP", label, float(stat), cvs, LEFT, True, lags, T,
                      {"rho": float(rho), "lambda2": lam2, "gamma0": gamma0})
