"""Hodrick-Prescott trend as an unobserved-components model sampled by Gibbs.

Model::

    y_t = tau_t + c_t,          c_t ~ N(0, sigma_c^2)
    tau_t - 2 tau_{t-1} + tau_{t-2} ~ N(0, sigma_tau^2)

Given the variances the trend is Gaussian with banded precision
``I / sigma_c^2 + D'D / sigma_tau^2`` (``D`` the second-difference
operator); given the trend both variances are inverse-gamma.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cholesky_banded, cho_solve_banded, solve_banded

from ..core import Decomposition, InsufficientDataError, ProfitRateError, TimeSeries, make_rng

__all__ = ["EhpSpec", "EhpResult", "ehp", "hp_filter", "second_difference", "default_priors"]


@dataclass(frozen=True)
class EhpSpec:
    """Sampler settings.

    Prior scales left as ``None`` are set from the data (see
    :func:`default_priors`), both with shape 3.
    """

    draws: int = 10_000
    burn_in: int = 1_000
    seed: int = 0
    tau_shape: float = 3.0
    tau_scale: float | None = None
    cycle_shape: float = 3.0
    cycle_scale: float | None = None

    def __post_init__(self):
        if not self.draws > self.burn_in >= 0:
            raise ProfitRateError("need draws > burn_in >= 0")
        if self.tau_shape <= 0 or self.cycle_shape <= 0:
            raise ProfitRateError("inverse-gamma shapes must be positive")
        for s in (self.tau_scale, self.cycle_scale):
            if s is not None and not s > 0:
                raise ProfitRateError("inverse-gamma scales must be positive")


@dataclass(frozen=True)
class EhpResult:
    mean_trend: Decomposition
    last_draw_trend: Decomposition
    draw_log: np.ndarray  # per iteration: trend at the midpoint, sigma_tau^2, sigma_c^2
    sigma_tau2_mean: float
    sigma_c2_mean: float
    meta: dict = field(default_factory=dict)

    @property
    def smoothing(self) -> float:
        """HP smoothing parameter implied by the posterior-mean variances."""
        return self.sigma_c2_mean / self.sigma_tau2_mean


def second_difference(n: int) -> np.ndarray:
    D = np.zeros((n - 2, n))
    for i in range(n - 2):
        D[i, i:i + 3] = (1.0, -2.0, 1.0)
    return D


def _dtd_bands(n: int) -> np.ndarray:
    """Upper banded storage (3 x n) of ``D'D``."""
    diag = np.full(n, 6.0)
    diag[[0, -1]] = 1.0
    diag[[1, -2]] = 5.0
    off1 = np.full(n - 1, -4.0)
    off1[[0, -1]] = -2.0
    off2 = np.ones(n - 2)
    ab = np.zeros((3, n))
    ab[0, 2:] = off2
    ab[1, 1:] = off1
    ab[2] = diag
    return ab


def hp_filter(y, smoothing: float) -> np.ndarray:
    """Deterministic HP trend solving ``(I + smoothing * D'D) tau = y``."""
    y = np.asarray(y, dtype=float)
    n = y.size
    if n < 5:
        raise InsufficientDataError("HP filter needs at least 5 observations")
    ab = smoothing * _dtd_bands(n)
    ab[2] += 1.0
    return cho_solve_banded((cholesky_banded(ab), False), y)


def default_priors(y: np.ndarray, prior_smoothing: float = 100.0) -> tuple[float, float]:
    """Data-scaled inverse-gamma scales (trend innovation, cycle).

    With a smooth trend ``Var(diff(y, 2)) ~ sigma_tau^2 + 6 sigma_c^2``, so
    the cycle scale is ``2 Var(diff(y, 2)) / 6``.  The trend scale is that
    divided by ``prior_smoothing`` (100, the usual annual-data HP value),
    which centres the prior ratio of the two variances there.  Scales are
    floored at ``1e-8 Var(y)`` to keep the precision matrix well
    conditioned on exact polynomials.
    """
    var_y = float(np.var(y, ddof=1))
    cyc = 2.0 * float(np.var(np.diff(y, 2), ddof=1)) / 6.0
    floor = max(1e-8 * var_y, 1e-14)
    return max(cyc / prior_smoothing, floor), max(cyc, floor)


def ehp(series: TimeSeries, spec: EhpSpec = EhpSpec()) -> EhpResult:
    """Gibbs sampler for the unobserved-components HP model.

    Returns decompositions for the posterior-mean trend (averaged over the
    post-burn-in draws) and for the final draw; in both the cycle is
    ``y - trend`` so additivity is exact.
    """
    y = series.values
    n = y.size
    if n < 5:
        raise InsufficientDataError("EHP needs at least 5 observations")
    tau_scale0, cyc_scale0 = default_priors(y)
    tau_scale = spec.tau_scale if spec.tau_scale is not None else tau_scale0
    cyc_scale = spec.cycle_scale if spec.cycle_scale is not None else cyc_scale0
    rng = make_rng(spec.seed)
    dtd = _dtd_bands(n)

    sig_tau2 = tau_scale / (spec.tau_shape + 1.0)
    sig_c2 = cyc_scale / (spec.cycle_shape + 1.0)
    trend_sum = np.zeros(n)
    st_sum = sc_sum = 0.0
    kept = 0
    log = np.empty((spec.draws, 3))
    mid = n // 2
    tau = y.copy()
    shape_tau = spec.tau_shape + 0.5 * (n - 2)
    shape_c = spec.cycle_shape + 0.5 * n
    for it in range(spec.draws):
        ab = dtd / sig_tau2
        ab[2] += 1.0 / sig_c2
        try:
            U = cholesky_banded(ab)
        except np.linalg.LinAlgError as exc:
            raise ProfitRateError("trend precision is not positive definite") from exc
        mean = cho_solve_banded((U, False), y / sig_c2)
        # U'U = P, so U^{-1} z has covariance P^{-1}
        tau = mean + solve_banded((0, 2), U, rng.standard_normal(n))
        d2 = np.diff(tau, 2)
        sig_tau2 = (tau_scale + 0.5 * d2 @ d2) / rng.gamma(shape_tau)
        resid = y - tau
        sig_c2 = (cyc_scale + 0.5 * resid @ resid) / rng.gamma(shape_c)
        log[it] = (tau[mid], sig_tau2, sig_c2)
        if it >= spec.burn_in:
            trend_sum += tau
            st_sum += sig_tau2
            sc_sum += sig_c2
            kept += 1
    mean_trend = trend_sum / kept
    mean_dec = Decomposition(series, mean_trend, {"cycle": y - mean_trend}, "EHP", {"estimate": "posterior_mean"})
    last_dec = Decomposition(series, tau, {"cycle": y - tau}, "EHP", {"estimate": "last_draw"})
    return EhpResult(mean_dec, last_dec, log, st_sum / kept, sc_sum / kept,
                     {"tau_prior": (spec.tau_shape, tau_scale), "cycle_prior": (spec.cycle_shape, cyc_scale),
                      "draws": spec.draws, "burn_in": spec.burn_in, "seed": spec.seed})
