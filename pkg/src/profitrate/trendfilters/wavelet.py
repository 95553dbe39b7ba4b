"""Least-asymmetric Daubechies pyramid DWT and its multiresolution analysis.

Conventions follow the periodic pyramid algorithm: at level ``j``

    W_j[t] = sum_l h[l] V_{j-1}[(2t + 1 - l) mod N_{j-1}]
    V_j[t] = sum_l g[l] V_{j-1}[(2t + 1 - l) mod N_{j-1}]

with ``g`` the scaling filter and ``h[l] = (-1)**l g[L-1-l]`` the wavelet
filter.  Detail ``D_j`` and smooth ``S_J`` are obtained by synthesising a
single level of coefficients with all others zeroed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import Decomposition, InsufficientDataError, ProfitRateError, TimeSeries

__all__ = ["LA8_SCALING", "WaveletSpec", "scaling_filter", "wavelet_filter", "dwt", "idwt", "dwt_mra", "mra_levels"]

# Least-asymmetric Daubechies scaling filter, 8 vanishing moments, 16 taps.
LA8_SCALING = np.array([
    -0.0033824159510050025955,
    -0.00054213233180001068935,
    0.031695087811525991431,
    0.0076074873249766081919,
    -0.14329423835127266284,
    -0.061273359067811077843,
    0.48135965125905339159,
    0.77718575169962802862,
    0.36444189483617893676,
    -0.051945838107881800736,
    -0.027219029917103486322,
    0.049137179673730286787,
    0.0038087520138944894631,
    -0.014952258337062199118,
    -0.00030292051472413308126,
    0.0018899503327676891843,
])


@dataclass(frozen=True)
class WaveletSpec:
    depth_J: int = 4
    vanishing_moments: int = 8
    boundary: str = "periodic"

    def __post_init__(self):
        if self.vanishing_moments != 8:
            raise ProfitRateError("only the 8-vanishing-moment least-asymmetric filter is available")
        if self.boundary not in ("periodic", "reflection"):
            raise ProfitRateError(f"unknown boundary rule {self.boundary!r}")
        if self.depth_J < 1:
            raise ProfitRateError("depth_J must be at least 1")

    @property
    def filter_length(self) -> int:
        return 2 * self.vanishing_moments


def scaling_filter(spec: WaveletSpec | None = None) -> np.ndarray:
    return LA8_SCALING.copy()


def wavelet_filter(spec: WaveletSpec | None = None) -> np.ndarray:
    g = scaling_filter(spec)
    return g[::-1] * (-1.0) ** np.arange(g.size)


def _analysis(v: np.ndarray, g: np.ndarray, h: np.ndarray):
    n = v.size
    t = np.arange(n // 2)
    idx = (2 * t[:, None] + 1 - np.arange(g.size)[None, :]) % n
    seg = v[idx]
    return seg @ h, seg @ g


def _synthesis(w: np.ndarray, v: np.ndarray, g: np.ndarray, h: np.ndarray) -> np.ndarray:
    m = w.size
    out = np.zeros(2 * m)
    t = np.arange(m)
    idx = (2 * t[:, None] + 1 - np.arange(g.size)[None, :]) % (2 * m)
    np.add.at(out, idx, w[:, None] * h[None, :] + v[:, None] * g[None, :])
    return out


def _check_length(n: int, J: int) -> None:
    if n % (2 ** J):
        raise ProfitRateError(f"periodic pyramid needs length divisible by 2**{J}, got {n}")


def dwt(x, J: int) -> tuple[list[np.ndarray], np.ndarray]:
    """Periodic pyramid DWT: wavelet coefficients ``[W_1..W_J]`` and scaling ``V_J``."""
    v = np.asarray(x, dtype=float)
    _check_length(v.size, J)
    g = LA8_SCALING
    h = wavelet_filter()
    ws = []
    for _ in range(J):
        w, v = _analysis(v, g, h)
        ws.append(w)
    return ws, v


def idwt(ws: list[np.ndarray], v: np.ndarray) -> np.ndarray:
    g = LA8_SCALING
    h = wavelet_filter()
    for w in reversed(ws):
        v = _synthesis(w, v, g, h)
    return v


def _extend(y: np.ndarray, J: int, boundary: str) -> np.ndarray:
    """Extend to a multiple of 2**J: reflected copy, then periodic padding."""
    if boundary == "reflection":
        y = np.concatenate([y, y[::-1]])
    block = 2 ** J
    pad = (-y.size) % block
    if pad:
        y = np.concatenate([y, y[:pad]])
    return y


def dwt_mra(series: TimeSeries, spec: WaveletSpec = WaveletSpec()) -> Decomposition:
    """Multiresolution analysis ``x = D_1 + ... + D_J + S_J``; the trend is ``S_J``.

    Series whose length is not a multiple of ``2**J`` are padded by
    wrap-around (or reflected, then wrapped) and the MRA is cropped back to
    the original span; additivity holds exactly on that span since the
    synthesis is linear.
    """
    y = series.values
    n = y.size
    J = spec.depth_J
    if n < spec.filter_length:
        raise InsufficientDataError(f"series of length {n} is shorter than the {spec.filter_length}-tap filter")
    if J > int(np.floor(np.log2(n))):
        raise ProfitRateError(f"depth_J={J} exceeds floor(log2 {n})")
    x = _extend(y, J, spec.boundary)
    ws, v = dwt(x, J)
    zeros = [np.zeros_like(w) for w in ws]
    comps = {}
    for j in range(J):
        sel = list(zeros)
        sel[j] = ws[j]
        comps[f"D{j + 1}"] = idwt(sel, np.zeros_like(v))[:n]
    smooth = idwt(zeros, v)[:n]
    energy = {f"W{j + 1}": float(np.dot(w, w)) for j, w in enumerate(ws)}
    energy[f"V{J}"] = float(np.dot(v, v))
    return Decomposition(series, smooth, comps, "DW", {"depth_J": J, "boundary": spec.boundary,
                                                        "coefficient_energy": energy,
                                                        "extended_length": x.size})


def mra_levels(decomp: Decomposition) -> list[np.ndarray]:
    """Cumulative reconstructions, coarse to fine.

    ``levels[0]`` is ``S_J``; ``levels[k]`` adds ``D_J, ..., D_{J-k+1}``;
    ``levels[J]`` is the full reconstruction.
    """
    if decomp.filter_tag != "DW":
        raise ProfitRateError("mra_levels needs a wavelet decomposition")
    J = decomp.meta["depth_J"]
    out = [decomp.trend.copy()]
    acc = decomp.trend.copy()
    for j in range(J, 0, -1):
        acc = acc + decomp.components[f"D{j}"]
        out.append(acc.copy())
    return out
