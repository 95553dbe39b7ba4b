"""Additive trend filters: wavelet MRA (DW), EMD, and Gibbs-sampled HP (EHP)."""

from .ehp import EhpResult, EhpSpec, ehp, hp_filter
from .emd import EmdSpec, emd
from .wavelet import WaveletSpec, dwt_mra, mra_levels

__all__ = [
    "WaveletSpec", "dwt_mra", "mra_levels",
    "EmdSpec", "emd",
    "EhpSpec", "EhpResult", "ehp", "hp_filter",
    "trend_of",
]


def trend_of(series, tag: str, *, wavelet=WaveletSpec(), emd_spec=EmdSpec(), ehp_spec=EhpSpec()):
    """Run one filter and return its Decomposition (EHP: the posterior-mean trend)."""
    if tag == "DW":
        return dwt_mra(series, wavelet)
    if tag == "EMD":
        return emd(series, emd_spec)
    if tag == "EHP":
        return ehp(series, ehp_spec).mean_trend
    raise ValueError(f"unknown filter {tag!r}")
