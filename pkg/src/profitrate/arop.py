"""Sector classification masks and average-rate-of-profit aggregation.

A sector's profit rate is its surplus over the capital advanced,
``S / (C + V)``, where variable capital ``V`` is labour compensation and
constant capital ``C`` is the sector's share of the economy-wide capital
stock plus intermediate consumption.  The economy-wide rate is the
capital-weighted (or plain) mean of the included sectors' rates.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import ProfitRateError, TimeSeries, as_finite_array

__all__ = [
    "PROVENANCES",
    "SectorPanel",
    "ClassificationMask",
    "RateVariant",
    "normalize_name",
    "load_mask",
    "load_panel",
    "criteria_mask",
    "disaggregate_capital",
    "sector_rates",
    "compute_arop",
]

PROVENANCES = ("criteria", "pca_simple", "pca_weighted", "bw", "dfm", "all")

PANEL_MATRICES = ("surplus", "depreciation", "compensation", "value_added")
PANEL_TOTALS = ("total_capital_stock", "total_intermediate_consumption")


def normalize_name(name: str) -> str:
    """Whitespace-collapsed, case-folded sector key."""
    return re.sub(r"\s+", " ", str(name)).strip().casefold()


@dataclass(frozen=True)
class SectorPanel:
    """Sector x year national-accounts panel plus economy-wide totals."""

    sectors: tuple[str, ...]
    start_year: int
    surplus: np.ndarray
    depreciation: np.ndarray
    compensation: np.ndarray
    value_added: np.ndarray
    total_capital_stock: np.ndarray
    total_intermediate_consumption: np.ndarray

    def __post_init__(self):
        sectors = tuple(str(s) for s in self.sectors)
        keys = [normalize_name(s) for s in sectors]
        if len(set(keys)) != len(keys):
            raise ProfitRateError("duplicate sector names in panel")
        object.__setattr__(self, "sectors", sectors)
        shape = None
        for name in PANEL_MATRICES:
            arr = as_finite_array(getattr(self, name), name)
            if arr.ndim != 2:
                raise ProfitRateError(f"{name} must be a sectors x years matrix")
            shape = shape or arr.shape
            if arr.shape != shape or arr.shape[0] != len(sectors):
                raise ProfitRateError(f"{name} has shape {arr.shape}, expected {(len(sectors), shape[1])}")
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        for name in PANEL_TOTALS:
            arr = as_finite_array(getattr(self, name), name).ravel().copy()
            if arr.shape != (shape[1],):
                raise ProfitRateError(f"{name} must have one value per year")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if np.any(self.compensation < 0) or np.any(self.value_added < 0):
            raise ProfitRateError("compensation and value added must be non-negative")
        bad = np.flatnonzero(self.total_capital_stock <= 0)
        if bad.size:
            raise ProfitRateError(f"total capital stock must be positive (year {self.start_year + bad[0]})")

    @property
    def n_years(self) -> int:
        return self.surplus.shape[1]

    @property
    def years(self) -> np.ndarray:
        return self.start_year + np.arange(self.n_years)

    def index(self, sector: str) -> int:
        key = normalize_name(sector)
        for i, s in enumerate(self.sectors):
            if normalize_name(s) == key:
                return i
        raise KeyError(sector)


@dataclass(frozen=True)
class ClassificationMask:
    """Include (1) / exclude (0) flag per sector, keyed by normalised name."""

    flags: Mapping[str, int]
    provenance: str = "criteria"
    labels: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ProfitRateError(f"unknown mask provenance {self.provenance!r}")
        flags, labels = {}, {}
        for name, flag in self.flags.items():
            key = normalize_name(name)
            if key in flags:
                raise ProfitRateError(f"duplicate sector in mask: {name!r}")
            if flag not in (0, 1):
                raise ProfitRateError(f"flag for {name!r} must be 0 or 1, got {flag!r}")
            flags[key] = int(flag)
            labels[key] = self.labels.get(key, self.labels.get(name, str(name)))
        if self.provenance == "all" and not all(flags.values()):
            raise ProfitRateError("an 'all' mask must include every sector")
        object.__setattr__(self, "flags", flags)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def include_all(cls, sectors: Iterable[str]) -> "ClassificationMask":
        sectors = list(sectors)
        return cls({s: 1 for s in sectors}, "all", {normalize_name(s): s for s in sectors})

    @classmethod
    def from_excluded(cls, sectors: Iterable[str], excluded: Iterable[str], provenance: str) -> "ClassificationMask":
        drop = {normalize_name(s) for s in excluded}
        sectors = list(sectors)
        return cls(
            {s: int(normalize_name(s) not in drop) for s in sectors},
            provenance,
            {normalize_name(s): s for s in sectors},
        )

    def flag(self, sector: str) -> int:
        return self.flags[normalize_name(sector)]

    def included(self) -> list[str]:
        return [self.labels[k] for k, v in self.flags.items() if v]

    def excluded(self) -> list[str]:
        return [self.labels[k] for k, v in self.flags.items() if not v]

    def check(self, panel: SectorPanel) -> dict[str, list[str]]:
        """Report panel sectors without a flag and flags naming unknown sectors."""
        panel_keys = {normalize_name(s): s for s in panel.sectors}
        return {
            "missing": [s for k, s in panel_keys.items() if k not in self.flags],
            "unknown": [self.labels[k] for k in self.flags if k not in panel_keys],
        }

    def vector(self, panel: SectorPanel) -> np.ndarray:
        report = self.check(panel)
        if report["missing"]:
            raise ProfitRateError(f"mask has no flag for sectors: {', '.join(report['missing'])}")
        return np.array([self.flags[normalize_name(s)] for s in panel.sectors], dtype=bool)

    def write(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["sector", "flag"])
            for k, v in self.flags.items():
                w.writerow([self.labels[k], v])


@dataclass(frozen=True)
class RateVariant:
    basis: str = "net"
    weighting: str = "weighted"

    def __post_init__(self):
        if self.basis not in ("gross", "net"):
            raise ProfitRateError(f"basis must be gross or net, got {self.basis!r}")
        if self.weighting not in ("weighted", "unweighted"):
            raise ProfitRateError(f"weighting must be weighted or unweighted, got {self.weighting!r}")

    @property
    def tag(self) -> str:
        return f"{self.basis}_{self.weighting}"


def _read_rows(path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ProfitRateError(f"{path}: missing header row")
        reader.fieldnames = [f.strip().lower() for f in reader.fieldnames]
        return list(reader)


def load_mask(source, provenance: str = "criteria") -> ClassificationMask:
    """Read a two-column ``sector,flag`` CSV."""
    rows = _read_rows(source)
    flags: dict[str, int] = {}
    labels: dict[str, str] = {}
    for lineno, row in enumerate(rows, start=2):
        try:
            name, raw = row["sector"], row["flag"]
        except KeyError as exc:
            raise ProfitRateError(f"{source}: expected columns sector,flag") from exc
        key = normalize_name(name)
        if key in flags:
            raise ProfitRateError(f"{source}:{lineno}: duplicate sector {name.strip()!r}")
        try:
            value = float(raw)
        except (TypeError, ValueError):
            value = None
        if value not in (0.0, 1.0):
            raise ProfitRateError(f"{source}:{lineno}: flag must be 0 or 1, got {raw!r}")
        flags[key] = int(value)
        labels[key] = re.sub(r"\s+", " ", name).strip()
    return ClassificationMask(flags, provenance, labels)


def criteria_mask() -> ClassificationMask:
    """The bundled productive/unproductive classification of the 47 consolidated BEA sectors."""
    return load_mask(Path(__file__).with_name("data") / "criteria_mask.csv", "criteria")


def _read_long(path):
    rows = _read_rows(path)
    table: dict[tuple[str, int], float] = {}
    order: list[str] = []
    seen = set()
    for lineno, row in enumerate(rows, start=2):
        try:
            sector, year, value = row["sector"], int(row["year"]), float(row["value"])
        except (KeyError, ValueError) as exc:
            raise ProfitRateError(f"{path}:{lineno}: expected sector,year,value") from exc
        key = normalize_name(sector)
        if (key, year) in table:
            raise ProfitRateError(f"{path}:{lineno}: duplicate entry for {sector!r} {year}")
        table[key, year] = value
        if key not in seen:
            seen.add(key)
            order.append(re.sub(r"\s+", " ", sector).strip())
    return table, order


def _read_totals(path) -> dict[int, float]:
    out = {}
    for lineno, row in enumerate(_read_rows(path), start=2):
        try:
            year, value = int(row["year"]), float(row["value"])
        except (KeyError, ValueError) as exc:
            raise ProfitRateError(f"{path}:{lineno}: expected year,value") from exc
        if year in out:
            raise ProfitRateError(f"{path}:{lineno}: duplicate year {year}")
        out[year] = value
    return out


def load_panel(paths: Mapping[str, str | Path]) -> SectorPanel:
    """Assemble a panel from long-format CSV files.

    ``paths`` maps each of surplus, depreciation, compensation, value_added
    to a ``sector,year,value`` file and total_capital_stock,
    total_intermediate_consumption to ``year,value`` files.
    """
    missing = [k for k in PANEL_MATRICES + PANEL_TOTALS if k not in paths]
    if missing:
        raise ProfitRateError(f"panel input missing: {', '.join(missing)}")
    tables = {}
    sectors = None
    for name in PANEL_MATRICES:
        tables[name], order = _read_long(paths[name])
        if sectors is None:
            sectors = order
    years = sorted({y for (_, y) in tables["surplus"]})
    if not years:
        raise ProfitRateError("panel has no observations")
    if years != list(range(years[0], years[-1] + 1)):
        raise ProfitRateError("panel years must be consecutive")
    mats = {}
    for name in PANEL_MATRICES:
        m = np.empty((len(sectors), len(years)))
        for i, s in enumerate(sectors):
            key = normalize_name(s)
            for j, y in enumerate(years):
                try:
                    m[i, j] = tables[name][key, y]
                except KeyError:
                    raise ProfitRateError(f"{name}: no value for {s!r} in {y}") from None
        extra = {k for k in tables[name] if k[1] not in years or k[0] not in {normalize_name(s) for s in sectors}}
        if extra:
            raise ProfitRateError(f"{name}: entries outside the panel grid, e.g. {sorted(extra)[0]}")
        mats[name] = m
    totals = {}
    for name in PANEL_TOTALS:
        t = _read_totals(paths[name])
        try:
            totals[name] = np.array([t[y] for y in years])
        except KeyError as exc:
            raise ProfitRateError(f"{name}: no value for year {exc.args[0]}") from None
    return SectorPanel(tuple(sectors), years[0], **mats, **totals)


def write_panel(panel: SectorPanel, directory) -> dict[str, Path]:
    """Inverse of :func:`load_panel`; returns the path map."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = {}
    for name in PANEL_MATRICES:
        p = directory / f"{name}.csv"
        m = getattr(panel, name)
        with open(p, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["sector", "year", "value"])
            for i, s in enumerate(panel.sectors):
                for j, y in enumerate(panel.years):
                    w.writerow([s, int(y), f"{m[i, j]:.12g}"])
        paths[name] = p
    for name in PANEL_TOTALS:
        p = directory / f"{name}.csv"
        with open(p, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["year", "value"])
            for y, v in zip(panel.years, getattr(panel, name)):
                w.writerow([int(y), f"{v:.12g}"])
        paths[name] = p
    return paths


def disaggregate_capital(panel: SectorPanel, share_basis: str = "value_added") -> np.ndarray:
    """Allocate economy-wide stock plus intermediate consumption to sectors.

    Each sector receives its per-year share of ``share_basis``
    (``value_added`` or ``compensation``) times
    ``total_capital_stock + total_intermediate_consumption``.
    """
    if share_basis not in ("value_added", "compensation"):
        raise ProfitRateError(f"share basis must be value_added or compensation, got {share_basis!r}")
    basis = getattr(panel, share_basis)
    totals = basis.sum(axis=0)
    bad = np.flatnonzero(~(totals > 0))
    if bad.size:
        raise ProfitRateError(f"total {share_basis.replace('_', ' ')} is zero in {panel.start_year + bad[0]}")
    shares = basis / totals
    return shares * (panel.total_capital_stock + panel.total_intermediate_consumption)


def sector_rates(panel: SectorPanel, variant: RateVariant = RateVariant(), share_basis: str = "value_added"):
    """Per-sector profit rates and capital advanced ``C + V`` (both sectors x years)."""
    capital = disaggregate_capital(panel, share_basis) + panel.compensation
    surplus = panel.surplus - panel.depreciation if variant.basis == "net" else panel.surplus
    with np.errstate(divide="ignore", invalid="ignore"):
        rates = surplus / capital
    return rates, capital


def compute_arop(
    panel: SectorPanel,
    mask: ClassificationMask,
    variant: RateVariant = RateVariant(),
    share_basis: str = "value_added",
) -> TimeSeries:
    """Average rate of profit over the sectors the mask includes."""
    include = mask.vector(panel)
    if not include.any():
        raise ProfitRateError("mask includes no sectors")
    rates, capital = sector_rates(panel, variant, share_basis)
    idx = np.flatnonzero(include)
    for i in idx:
        bad = np.flatnonzero(~(capital[i] > 0))
        if bad.size:
            raise ProfitRateError(
                f"non-positive capital advanced for {panel.sectors[i]!r} in {panel.start_year + bad[0]}"
            )
    r, k = rates[idx], capital[idx]
    if variant.weighting == "weighted":
        w = k / k.sum(axis=0)
    else:
        w = np.full_like(r, 1.0 / len(idx))
    label = f"ARoP {variant.basis} {variant.weighting} ({mask.provenance})"
    return TimeSeries(panel.start_year, (w * r).sum(axis=0), label)


def included_sectors(panel: SectorPanel, mask: ClassificationMask) -> list[str]:
    inc = mask.vector(panel)
    return [s for s, f in zip(panel.sectors, inc) if f]


def rate_matrix(panel: SectorPanel, variant: RateVariant = RateVariant(), sectors: Sequence[str] | None = None,
                share_basis: str = "value_added") -> np.ndarray:
    """Years x sectors matrix of sector profit rates (observations in rows)."""
    rates, capital = sector_rates(panel, variant, share_basis)
    if not np.all(capital > 0):
        i, j = np.argwhere(~(capital > 0))[0]
        raise ProfitRateError(f"non-positive capital advanced for {panel.sectors[i]!r} in {panel.start_year + j}")
    if sectors is not None:
        rates = rates[[panel.index(s) for s in sectors]]
    return rates.T.copy()
