"""Command-line interface: ``profitrate <subcommand> ...``.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from ..arop import RateVariant, write_panel
from ..core import NumericalError, ProfitRateError
from ..synthetic import BUNDLED_SEED, declining_panel
from . import pipeline as pl
from .config import ConfigError, PipelineConfig, load_config
from .io import read_series, write_json, write_manifest
from .plot import render_plot

__all__ = ["main", "run_pipeline", "render_plot", "load_config", "PipelineConfig", "ConfigError"]

run_pipeline = pl.run_pipeline

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4
log = logging.getLogger("profitrate")


def _exit_code(exc: BaseException) -> int:
    cause = exc.cause if isinstance(exc, pl.StageError) else exc
    if isinstance(cause, ConfigError):
        return EXIT_CONFIG
    if isinstance(cause, (NumericalError, np.linalg.LinAlgError, FloatingPointError)):
        return EXIT_NUMERIC
    return EXIT_DATA


def _common(p: argparse.ArgumentParser):
    p.add_argument("--panel-dir", required=True, type=Path, help="directory with the six panel CSVs")
    p.add_argument("--mask", type=Path, help="sector,flag CSV (default: bundled criteria mask)")
    p.add_argument("--outdir", required=True, type=Path)
    p.add_argument("--basis", default="net", choices=("gross", "net"))
    p.add_argument("--weighting", default="weighted", choices=("weighted", "unweighted"))
    p.add_argument("--share-basis", default="value_added", choices=("value_added", "compensation"))


def _config_from_args(a) -> PipelineConfig:
    return PipelineConfig(
        panel_dir=a.panel_dir, outdir=a.outdir, mask=a.mask,
        seeds={"ehp": getattr(a, "seed", 0), "split": getattr(a, "seed", 0), "dfm": getattr(a, "seed", 0)},
        variant=RateVariant(a.basis, a.weighting), share_basis=a.share_basis,
        filters=tuple(getattr(a, "filters", "DW,EMD,EHP").split(",")),
        ehp_draws=getattr(a, "draws", 10000), ehp_burn_in=getattr(a, "burn_in", 1000),
        wavelet_depth=getattr(a, "depth", 4), window_years=getattr(a, "window_years", 9),
        dfm_k_max=getattr(a, "k_max", 8), dfm_p_max=getattr(a, "p_max", 4),
    ).validate()


def _stage(a, cfg: PipelineConfig):
    panel, mask = pl.load_inputs(cfg)
    out = cfg.outdir
    name = a.command
    if name == "ingest-check":
        rep = mask.check(panel)
        write_json(out / "ingest" / "report.json", {
            "sectors": len(panel.sectors), "years": [int(panel.years[0]), int(panel.years[-1])],
            "included": len(mask.included()), "excluded": mask.excluded(), **rep})
        print(f"{len(panel.sectors)} sectors, {panel.n_years} years; "
              f"{len(rep['unknown'])} unknown mask rows")
    elif name == "arop":
        s = pl.stage_arop(panel, mask, cfg, out / "arop")
        print(f"{s.label}: {s.values[0]:.6g} ({s.start_year}) to {s.values[-1]:.6g} ({s.end_year})")
    else:
        series = pl.compute_arop(panel, mask, cfg.variant, cfg.share_basis)
        if name == "seasonality":
            print("verdict:", pl.stage_seasonality(series, cfg, out / "seasonality"))
        elif name == "filter":
            for tag, slope in pl.stage_filter(series, cfg, out / "filter").items():
                print(f"{tag}: slope {slope:.6g} per year")
        elif name == "battery":
            rep = pl.stage_battery(series, out / "battery")
            print(f"{rep.count('non_stationary')} of {rep.shape[0] * rep.shape[1]} cells non-stationary")
        elif name == "pca":
            masks = pl.stage_pca(panel, mask, cfg, out / "pca")
            for k, m in masks.items():
                print(f"{k}: {len(m.excluded()) - len(mask.excluded())} sectors flagged")
        elif name == "svd":
            res = pl.stage_svd(panel, mask, cfg, out / "svd")
            print(f"{res.relevant_count} relevant singular values")
        elif name == "regress":
            m = pl.stage_regress(panel, mask, series, cfg, out / "regress")
            print(f"{len(m.excluded()) - len(mask.excluded())} sectors dropped")
        elif name == "dfm":
            m = pl.stage_dfm(panel, mask, cfg, out / "dfm")
            print(f"{len(m.excluded()) - len(mask.excluded())} sectors flagged")
    write_manifest(out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="profitrate", description="Sectoral profit-rate trend analysis.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("ingest-check", "arop", "seasonality", "filter", "battery", "pca", "svd", "regress", "dfm"):
        p = sub.add_parser(name)
        _common(p)
        if name == "seasonality":
            p.add_argument("--window-years", type=int, default=9)
        if name == "filter":
            p.add_argument("--filters", default="DW,EMD,EHP")
            p.add_argument("--depth", type=int, default=4)
            p.add_argument("--draws", type=int, default=10000)
            p.add_argument("--burn-in", type=int, default=1000)
            p.add_argument("--seed", type=int, default=0)
        if name == "regress":
            p.add_argument("--seed", type=int, default=0, help="train/test split seed")
        if name == "dfm":
            p.add_argument("--k-max", type=int, default=8)
            p.add_argument("--p-max", type=int, default=4)
            p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("pipeline")
    p.add_argument("--config", required=True, type=Path)

    p = sub.add_parser("plot")
    p.add_argument("--series", required=True, type=Path, help="CSV with a year column and one or more series")
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--title", default="")

    p = sub.add_parser("make-synthetic")
    p.add_argument("--outdir", required=True, type=Path)
    p.add_argument("--seed", type=int, default=BUNDLED_SEED)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if a.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if a.command == "pipeline":
            res = run_pipeline(load_config(a.config))
            for name, row in res.slope_matrix.items():
                print(name, " ".join(f"{t}={v:+.3e}" for t, v in row.items()))
            for note in res.notes:
                print("note:", note)
        elif a.command == "plot":
            years, cols = read_series(a.series)
            render_plot(a.out, [(k, years, v) for k, v in cols.items()], title=a.title)
        elif a.command == "make-synthetic":
            write_panel(declining_panel(a.seed), a.outdir)
        else:
            _stage(a, _config_from_args(a))
    except (ConfigError, ProfitRateError, pl.StageError, np.linalg.LinAlgError, FloatingPointError) as exc:
        code = _exit_code(exc)
        print(f"error: {exc}", file=sys.stderr)
        return code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
