"""INI pipeline configuration.

Example::

    [input]
    panel_dir = data/panel        ; six CSVs named after the panel fields
    mask = masks/criteria.csv     ; optional, defaults to the bundled mask

    [variant]
    basis = net
    weighting = weighted
    share_basis = value_added

    [filters]
    run = DW, EMD, EHP
    wavelet_depth = 4
    ehp_draws = 10000
    ehp_burn_in = 1000

    [battery]
    enabled = yes

    [selection]
    methods = pca_simple, pca_weighted, bw, dfm
    dfm_k_max = 8
    dfm_p_max = 4

    [seeds]
    ehp = 0
    split = 0
    dfm = 0

    [output]
    dir = out

``PROFITRATE_OUTDIR`` overrides ``[output] dir``.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from pathlib import Path

from ..arop import PANEL_MATRICES, PANEL_TOTALS, RateVariant
from ..core import FILTER_TAGS

__all__ = ["ConfigError", "PipelineConfig", "load_config", "SELECTION_METHODS", "SEED_KEYS", "panel_paths"]

SELECTION_METHODS = ("pca_simple", "pca_weighted", "bw", "dfm")
SEED_KEYS = ("ehp", "split", "dfm")
OUTDIR_ENV = "PROFITRATE_OUTDIR"


class ConfigError(ValueError):
    pass


def panel_paths(panel_dir) -> dict[str, Path]:
    d = Path(panel_dir)
    return {name: d / f"{name}.csv" for name in PANEL_MATRICES + PANEL_TOTALS}


@dataclass
class PipelineConfig:
    panel_dir: Path
    outdir: Path
    seeds: dict[str, int]
    mask: Path | None = None
    variant: RateVariant = RateVariant()
    share_basis: str = "value_added"
    filters: tuple[str, ...] = FILTER_TAGS
    wavelet_depth: int = 4
    ehp_draws: int = 10000
    ehp_burn_in: int = 1000
    battery: bool = True
    methods: tuple[str, ...] = SELECTION_METHODS
    dfm_k_max: int = 8
    dfm_p_max: int = 4
    window_years: int = 9
    extra: dict = field(default_factory=dict)

    def validate(self) -> "PipelineConfig":
        for name, p in panel_paths(self.panel_dir).items():
            if not p.is_file():
                raise ConfigError(f"panel file for {name} not found: {p}")
        if self.mask is not None and not Path(self.mask).is_file():
            raise ConfigError(f"mask file not found: {self.mask}")
        bad = [f for f in self.filters if f not in FILTER_TAGS]
        if bad:
            raise ConfigError(f"unknown filter(s): {', '.join(bad)}")
        bad = [m for m in self.methods if m not in SELECTION_METHODS]
        if bad:
            raise ConfigError(f"unknown selection method(s): {', '.join(bad)}")
        missing = [k for k in SEED_KEYS if k not in self.seeds]
        if missing:
            raise ConfigError(f"seeds must be explicit; missing: {', '.join(missing)}")
        try:
            self.outdir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"output directory not writable: {self.outdir}") from exc
        if not os.access(self.outdir, os.W_OK):
            raise ConfigError(f"output directory not writable: {self.outdir}")
        return self


def _list(value: str) -> tuple[str, ...]:
    return tuple(v.strip() for v in value.split(",") if v.strip())


def load_config(path) -> PipelineConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    base = path.parent

    def rel(p: str) -> Path:
        q = Path(p)
        return q if q.is_absolute() else base / q

    try:
        if not cp.has_option("input", "panel_dir"):
            raise ConfigError("[input] panel_dir is required")
        if not cp.has_section("seeds"):
            raise ConfigError("a [seeds] section with explicit seeds is required")
        seeds = {k: cp.getint("seeds", k) for k in cp.options("seeds")}
        outdir = os.environ.get(OUTDIR_ENV) or cp.get("output", "dir", fallback=None)
        if not outdir:
            raise ConfigError("[output] dir is required")
        cfg = PipelineConfig(
            panel_dir=rel(cp.get("input", "panel_dir")),
            outdir=rel(outdir) if not os.environ.get(OUTDIR_ENV) else Path(outdir),
            seeds=seeds,
            mask=rel(cp.get("input", "mask")) if cp.has_option("input", "mask") else None,
            variant=RateVariant(cp.get("variant", "basis", fallback="net"),
                                cp.get("variant", "weighting", fallback="weighted")),
            share_basis=cp.get("variant", "share_basis", fallback="value_added"),
            filters=_list(cp.get("filters", "run", fallback=",".join(FILTER_TAGS))),
            wavelet_depth=cp.getint("filters", "wavelet_depth", fallback=4),
            ehp_draws=cp.getint("filters", "ehp_draws", fallback=10000),
            ehp_burn_in=cp.getint("filters", "ehp_burn_in", fallback=1000),
            battery=cp.getboolean("battery", "enabled", fallback=True),
            methods=_list(cp.get("selection", "methods", fallback=",".join(SELECTION_METHODS))),
            dfm_k_max=cp.getint("selection", "dfm_k_max", fallback=8),
            dfm_p_max=cp.getint("selection", "dfm_p_max", fallback=4),
            window_years=cp.getint("seasonality", "window_years", fallback=9),
        )
    except (ValueError, configparser.Error) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    return cfg.validate()
