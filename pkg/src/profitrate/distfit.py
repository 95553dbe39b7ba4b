"""Parametric distribution fitting under four estimators, ranked by BIC.

Estimators
----------
mle
    Maximum likelihood; closed form for normal, lognormal and uniform,
    Nelder-Mead otherwise.
mme
    Moment matching (mean and variance; the t family also matches kurtosis).
mge
    Maximum goodness of fit: minimises the Cramer-von Mises distance.
mse
    Maximum spacing: maximises the mean log spacing of the fitted CDF at
    the order statistics.

Every fit's log-likelihood is evaluated at its own estimates, so the BIC
column is comparable across methods.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special, stats

from .core import InsufficientDataError, ProfitRateError, as_finite_array

__all__ = ["FAMILIES", "METHODS", "DistributionFit", "FitError", "fit", "select", "quantile", "cdf"]

log = logging.getLogger(__name__)

FAMILIES = ("normal", "lognormal", "cauchy", "student_t", "weibull", "uniform", "gamma")
METHODS = ("mle", "mge", "mme", "mse")
POSITIVE = {"lognormal", "weibull", "gamma"}
T_DF_BOUNDS = (2.01, 200.0)

PARAM_NAMES = {
    "normal": ("mean", "sd"),
    "lognormal": ("meanlog", "sdlog"),
    "cauchy": ("location", "scale"),
    "student_t": ("location", "scale", "df"),
    "weibull": ("shape", "scale"),
    "uniform": ("min", "max"),
    "gamma": ("shape", "rate"),
}


class FitError(ProfitRateError):
    pass


def _frozen(family: str, p: dict):
    if family == "normal":
        return stats.norm(p["mean"], p["sd"])
    if family == "lognormal":
        return stats.lognorm(p["sdlog"], scale=np.exp(p["meanlog"]))
    if family == "cauchy":
        return stats.cauchy(p["location"], p["scale"])
    if family == "student_t":
        return stats.t(p["df"], p["location"], p["scale"])
    if family == "weibull":
        return stats.weibull_min(p["shape"], scale=p["scale"])
    if family == "uniform":
        return stats.uniform(p["min"], p["max"] - p["min"])
    if family == "gamma":
        return stats.gamma(p["shape"], scale=1.0 / p["rate"])
    raise ProfitRateError(f"unknown family {family!r}")


def cdf(family: str, params: dict, x) -> np.ndarray:
    return _frozen(family, params).cdf(x)


def quantile(family: str, params: dict, q) -> np.ndarray:
    return _frozen(family, params).ppf(q)


def loglik(family: str, params: dict, x: np.ndarray) -> float:
    with np.errstate(divide="ignore"):
        return float(np.sum(_frozen(family, params).logpdf(x)))


@dataclass
class DistributionFit:
    family: str
    method: str
    params: dict
    loglik: float
    n: int
    converged: bool = True
    note: str = ""

    @property
    def k(self) -> int:
        return len(self.params)

    @property
    def bic(self) -> float:
        return self.k * np.log(self.n) - 2.0 * self.loglik

    def quantile(self, q):
        return quantile(self.family, self.params, q)


# unconstrained parameterisations for the optimiser

def _pack(family: str, p: dict) -> np.ndarray:
    if family == "normal":
        return np.array([p["mean"], np.log(p["sd"])])
    if family == "lognormal":
        return np.array([p["meanlog"], np.log(p["sdlog"])])
    if family == "cauchy":
        return np.array([p["location"], np.log(p["scale"])])
    if family == "student_t":
        lo, hi = T_DF_BOUNDS
        u = (p["df"] - lo) / (hi - lo)
        u = min(max(u, 1e-9), 1 - 1e-9)
        return np.array([p["location"], np.log(p["scale"]), np.log(u / (1 - u))])
    if family == "weibull":
        return np.array([np.log(p["shape"]), np.log(p["scale"])])
    if family == "uniform":
        return np.array([p["min"], np.log(p["max"] - p["min"])])
    if family == "gamma":
        return np.array([np.log(p["shape"]), np.log(p["rate"])])
    raise ProfitRateError(family)


def _unpack(family: str, v: np.ndarray) -> dict:
    names = PARAM_NAMES[family]
    if family in ("normal", "lognormal", "cauchy"):
        return dict(zip(names, (v[0], np.exp(v[1]))))
    if family == "student_t":
        lo, hi = T_DF_BOUNDS
        return {"location": v[0], "scale": np.exp(v[1]), "df": lo + (hi - lo) * special.expit(v[2])}
    if family in ("weibull", "gamma"):
        return dict(zip(names, np.exp(v)))
    if family == "uniform":
        return {"min": v[0], "max": v[0] + np.exp(v[1])}
    raise ProfitRateError(family)


def _moments(x):
    return float(x.mean()), float(x.var())


def _mme(family: str, x: np.ndarray) -> dict:
    m, v = _moments(x)
    if family == "normal":
        return {"mean": m, "sd": np.sqrt(v)}
    if family == "lognormal":
        s2 = np.log1p(v / m**2)
        return {"meanlog": np.log(m) - s2 / 2, "sdlog": np.sqrt(s2)}
    if family == "uniform":
        h = np.sqrt(3.0 * v)
        return {"min": m - h, "max": m + h}
    if family == "gamma":
        return {"shape": m * m / v, "rate": m / v}
    if family == "weibull":
        cv2 = v / m**2

        def gap(logk):
            k = np.exp(logk)
            return special.gamma(1 + 2 / k) / special.gamma(1 + 1 / k) ** 2 - 1 - cv2

        logk = optimize.brentq(gap, np.log(0.05), np.log(500.0))
        k = np.exp(logk)
        return {"shape": k, "scale": m / special.gamma(1 + 1 / k)}
    if family == "student_t":
        kurt = float(stats.kurtosis(x, fisher=True, bias=True))
        lo, hi = T_DF_BOUNDS
        df = hi if kurt <= 6.0 / (hi - 4.0) else min(max(4.0 + 6.0 / kurt, lo), hi)
        scale = np.sqrt(v * (df - 2.0) / df)
        return {"location": m, "scale": scale, "df": df}
    raise FitError(f"moment matching is undefined for the {family} family")


def _mle_closed(family: str, x: np.ndarray) -> dict | None:
    if family == "normal":
        return {"mean": float(x.mean()), "sd": float(x.std())}
    if family == "lognormal":
        lx = np.log(x)
        return {"meanlog": float(lx.mean()), "sdlog": float(lx.std())}
    if family == "uniform":
        return {"min": float(x.min()), "max": float(x.max())}
    return None


def _start(family: str, x: np.ndarray) -> dict:
    if family == "cauchy":
        q1, med, q3 = np.percentile(x, [25, 50, 75])
        return {"location": med, "scale": max((q3 - q1) / 2, 1e-8 * max(abs(med), 1.0))}
    if family == "student_t":
        p = _mme("student_t", x)
        p["df"] = min(max(p["df"], 3.0), 100.0)
        return p
    if family == "uniform":
        lo, hi = float(x.min()), float(x.max())
        pad = (hi - lo) / (x.size - 1)
        return {"min": lo - pad, "max": hi + pad}
    return _mme(family, x)


def _cvm(family, x_sorted, p):
    n = x_sorted.size
    F = _frozen(family, p).cdf(x_sorted)
    return 1.0 / (12 * n) + np.sum((F - (2 * np.arange(1, n + 1) - 1) / (2.0 * n)) ** 2)


def _neg_mean_log_spacing(family, x_sorted, p):
    F = _frozen(family, p).cdf(x_sorted)
    D = np.diff(np.concatenate([[0.0], F, [1.0]]))
    return -np.mean(np.log(np.maximum(D, 1e-300)))


def _minimize(objective, family, x, start: dict):
    v0 = _pack(family, start)

    def f(v):
        try:
            val = objective(_unpack(family, v))
        except (ValueError, FloatingPointError, OverflowError):
            return np.inf
        return val if np.isfinite(val) else 1e300

    with np.errstate(all="ignore"):
        res = optimize.minimize(f, v0, method="Nelder-Mead",
                                options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000 * v0.size,
                                         "maxfev": 8000 * v0.size})
    if not np.isfinite(res.fun) or res.fun >= 1e300:
        raise FitError(f"{family}: optimiser found no finite objective ({res.message})")
    return _unpack(family, res.x), bool(res.success), res


def _check_sample(family, x):
    if family in POSITIVE and np.any(x <= 0):
        raise FitError(f"{family} requires strictly positive data")


def fit(sample, family: str, method: str = "mle") -> DistributionFit:
    """Estimate ``family`` parameters from ``sample`` with ``method``."""
    x = as_finite_array(sample, "sample").ravel()
    if x.size < 5:
        raise InsufficientDataError("distribution fitting needs at least 5 observations")
    if family not in FAMILIES:
        raise ProfitRateError(f"unknown family {family!r}")
    if method not in METHODS:
        raise ProfitRateError(f"unknown method {method!r}")
    _check_sample(family, x)
    if np.ptp(x) == 0:
        raise FitError("sample is constant")
    xs = np.sort(x)
    converged, note = True, ""
    if method == "mme":
        params = _mme(family, x)
    elif method == "mle":
        params = _mle_closed(family, x)
        if params is None:
            params, converged, res = _minimize(lambda p: -loglik(family, p, x), family, x, _start(family, x))
            note = str(res.message)
    else:
        objective = _cvm if method == "mge" else _neg_mean_log_spacing
        start = _mle_closed(family, x) or _start(family, x)
        if family == "uniform":
            start = _start(family, x)
        params, converged, res = _minimize(lambda p: objective(family, xs, p), family, x, start)
        note = str(res.message)
    params = {k: float(v) for k, v in params.items()}
    return DistributionFit(family, method, params, loglik(family, params, x), x.size, converged, note)


@dataclass
class Selection:
    fits: list[DistributionFit]
    skipped: list[tuple[str, str, str]] = field(default_factory=list)

    @property
    def best(self) -> DistributionFit:
        return self.fits[0]

    def __iter__(self):
        return iter(self.fits)

    def __len__(self):
        return len(self.fits)


def select(sample, families=FAMILIES, methods=METHODS) -> Selection:
    """All admissible (family, method) fits in ascending BIC order."""
    x = as_finite_array(sample, "sample").ravel()
    fits, skipped = [], []
    for fam in families:
        for meth in methods:
            try:
                fits.append(fit(x, fam, meth))
            except FitError as exc:
                skipped.append((fam, meth, str(exc)))
                log.debug("skipping %s/%s: %s", fam, meth, exc)
    if not fits:
        raise FitError("no distribution could be fitted")
    # stable sort keeps the family/method order for ties
    fits.sort(key=lambda f: f.bic if np.isfinite(f.bic) else np.inf)
    return Selection(fits, skipped)
