"""Seeded synthetic sector panel with a known declining profit rate.

Sector rates follow ``base_i * (1 - drift t) + loading_i * cycle_t + noise``
with a common nine-year cycle.  Surplus is then backed out from the
disaggregated capital, so the weighted average rate inherits the negative
drift exactly up to the noise.
"""

from __future__ import annotations

import numpy as np

from .arop import SectorPanel, criteria_mask, disaggregate_capital
from .core import make_rng

__all__ = ["declining_panel", "BUNDLED_SEED"]

BUNDLED_SEED = 20240601


def declining_panel(seed: int = BUNDLED_SEED, start_year: int = 1960, n_years: int = 61,
                    sectors=None, drift: float = 0.008, noise_sd: float = 0.004) -> SectorPanel:
    """Panel over the bundled sector list (or ``sectors``) whose net rates decline by ``drift`` per year."""
    rng = make_rng(seed)
    if sectors is None:
        m = criteria_mask()
        sectors = [m.labels[k] for k in m.flags]
    sectors = tuple(sectors)
    N, T = len(sectors), n_years
    t = np.arange(T, dtype=float)

    compensation = rng.uniform(5.0, 60.0, N)[:, None] * np.exp(rng.uniform(0.03, 0.06, N)[:, None] * t)
    value_added = compensation * rng.uniform(1.3, 2.2, N)[:, None] * (1 + 0.02 * rng.standard_normal((N, T)))
    totals_va = value_added.sum(axis=0)
    total_capital_stock = 2.5 * totals_va * (1 + 0.004 * t)
    total_intermediate_consumption = 0.9 * totals_va

    base = rng.uniform(0.12, 0.35, N)
    loading = rng.uniform(-0.5, 1.5, N)
    cycle = 0.015 * np.sin(2 * np.pi * t / 9.0) + 0.008 * np.sin(2 * np.pi * t / 21.0 + 1.0)
    noise = np.zeros((N, T))
    eps = rng.standard_normal((N, T)) * noise_sd
    for j in range(1, T):
        noise[:, j] = 0.5 * noise[:, j - 1] + eps[:, j]
    net_rate = base[:, None] * (1 - drift * t) + loading[:, None] * cycle + noise
    net_rate = np.maximum(net_rate, 0.005)

    draft = SectorPanel(sectors, start_year, np.zeros((N, T)), np.zeros((N, T)), compensation, value_added,
                        total_capital_stock, total_intermediate_consumption)
    capital = disaggregate_capital(draft) + compensation
    depreciation = rng.uniform(0.02, 0.05, N)[:, None] * (capital - compensation)
    surplus = net_rate * capital + depreciation
    return SectorPanel(sectors, start_year, surplus, depreciation, compensation, value_added,
                       total_capital_stock, total_intermediate_consumption)
