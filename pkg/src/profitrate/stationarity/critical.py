"""Static critical-value tables for the unit-root battery.

Sources
-------
* Dickey-Fuller tau: MacKinnon (2010) response surfaces, one variable,
  ``cv(T) = b0 + b1/T + b2/T**2 + b3/T**3``.
* Dickey-Fuller normalised bias (PP Z(alpha)): Fuller (1976), Table 8.5.1.
* KPSS: Kwiatkowski et al. (1992), Table 1 (asymptotic).
* DF-GLS with trend and the point-optimal P statistic: Elliott, Rothenberg
  and Stock (1996), Table 1.  DF-GLS with constant uses the no-deterministic
  Dickey-Fuller surface, as ERS recommend.

Finite-sample tables are interpolated linearly in ``1/T`` so that the
asymptotic row sits at ``1/T = 0``.
"""

from __future__ import annotations

import numpy as np

LEVELS = (0.01, 0.05, 0.10)

_TAU_SURFACE = {
    "n": {
        0.01: (-2.56574, -2.2358, -3.627, 0.0),
        0.05: (-1.94100, -0.2686, -3.365, 31.223),
        0.10: (-1.61682, 0.2656, -2.714, 25.364),
    },
    "c": {
        0.01: (-3.43035, -6.5393, -16.786, -79.433),
        0.05: (-2.86154, -2.8903, -4.234, -40.040),
        0.10: (-2.56677, -1.5384, -2.809, 0.0),
    },
    "ct": {
        0.01: (-3.95877, -9.0531, -28.428, -134.155),
        0.05: (-3.41049, -4.3904, -9.036, -45.374),
        0.10: (-3.12705, -2.5856, -3.925, -22.380),
    },
}

_FULLER_T = np.array([25, 50, 100, 250, 500, np.inf])
_FULLER_BIAS = {
    "n": np.array([[-11.9, -7.3, -5.3], [-12.9, -7.7, -5.5], [-13.3, -7.9, -5.6],
                   [-13.6, -8.0, -5.7], [-13.7, -8.0, -5.7], [-13.8, -8.1, -5.7]]),
    "c": np.array([[-17.2, -12.5, -10.2], [-18.9, -13.3, -10.7], [-19.8, -13.7, -11.0],
                   [-20.3, -14.0, -11.2], [-20.5, -14.0, -11.2], [-20.7, -14.1, -11.3]]),
    "ct": np.array([[-22.5, -17.9, -15.6], [-25.7, -19.8, -16.8], [-27.4, -20.7, -17.5],
                    [-28.4, -21.3, -18.0], [-28.9, -21.5, -18.1], [-29.5, -21.8, -18.3]]),
}

_KPSS = {"c": (0.739, 0.463, 0.347), "ct": (0.216, 0.146, 0.119)}

_ERS_T = np.array([50, 100, 200, np.inf])
_DFGLS_TREND = np.array([[-3.77, -3.19, -2.89], [-3.58, -3.03, -2.74],
                         [-3.46, -2.93, -2.64], [-3.48, -2.89, -2.57]])
_PT = {
    "c": np.array([[1.87, 2.97, 3.91], [1.95, 3.11, 4.17], [1.91, 3.17, 4.33], [1.99, 3.26, 4.48]]),
    "ct": np.array([[4.22, 5.72, 6.77], [4.26, 5.64, 6.79], [4.05, 5.66, 6.86], [3.96, 5.62, 6.89]]),
}


def _interp(T: float, grid: np.ndarray, table: np.ndarray) -> dict[float, float]:
    inv = np.where(np.isinf(grid), 0.0, 1.0 / grid)
    order = np.argsort(inv)
    x = 1.0 / T if np.isfinite(T) else 0.0
    x = min(x, inv.max())
    return {lvl: float(np.interp(x, inv[order], table[order, i])) for i, lvl in enumerate(LEVELS)}


def tau_critical(trend: str, nobs: int) -> dict[float, float]:
    """Dickey-Fuller t-ratio critical values for trend ``n``, ``c`` or ``ct``."""
    surf = _TAU_SURFACE[trend]
    return {lvl: float(np.polyval(surf[lvl][::-1], 1.0 / nobs)) for lvl in LEVELS}


def bias_critical(trend: str, nobs: int) -> dict[float, float]:
    """Critical values for the normalised bias ``T (rho - 1)``."""
    return _interp(nobs, _FULLER_T, _FULLER_BIAS[trend])


def kpss_critical(trend: str) -> dict[float, float]:
    return dict(zip(LEVELS, _KPSS[trend]))


def dfgls_critical(trend: str, nobs: int) -> dict[float, float]:
    if trend == "c":
        return tau_critical("n", nobs)
    return _interp(nobs, _ERS_T, _DFGLS_TREND)


def pt_critical(trend: str, nobs: int) -> dict[float, float]:
    return _interp(nobs, _ERS_T, _PT[trend])
