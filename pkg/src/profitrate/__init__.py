"""Sectoral average rate of profit: aggregation, trend filters, unit-root tests and sector selection."""

from .arop import (ClassificationMask, RateVariant, SectorPanel, compute_arop, criteria_mask, load_mask,
                   load_panel)
from .core import (Decomposition, InsufficientDataError, NumericalError, ProfitRateError, TimeSeries,
                   linear_slope, make_rng, standardize)

__version__ = "0.1.0"

__all__ = [
    "ClassificationMask", "RateVariant", "SectorPanel", "compute_arop", "criteria_mask", "load_mask", "load_panel",
    "Decomposition", "InsufficientDataError", "NumericalError", "ProfitRateError", "TimeSeries", "linear_slope",
    "make_rng", "standardize", "bundled_synthetic_dir",
]


def bundled_synthetic_dir():
    """Directory holding the bundled synthetic panel CSVs."""
    from pathlib import Path
    return Path(__file__).with_name("data") / "synthetic"
