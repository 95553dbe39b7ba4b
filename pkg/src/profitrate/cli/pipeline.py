"""Stage functions and the end-to-end pipeline.

Each stage writes into ``<outdir>/<stage>/``.  ``run_pipeline`` builds all
stages in a scratch directory and moves them into place only when every
stage succeeded, so a failed run leaves no partial output behind.
"""

from __future__ import annotations

import shutil
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import dfm as dfm_mod
from ..arop import (ClassificationMask, SectorPanel, compute_arop, criteria_mask, included_sectors, load_mask,
                    load_panel, rate_matrix)
from ..core import ProfitRateError, TimeSeries, linear_slope, standardize_columns
from ..dimred import pca, select_sectors, svd_relevance
from ..regression import backward_eliminate, validate
from ..spectral import additivity_verdict, subperiod_seasonality
from ..stationarity import battery
from ..trendfilters import EhpSpec, EmdSpec, WaveletSpec, dwt_mra, ehp, emd
from .config import PipelineConfig, panel_paths
from .io import write_json, write_manifest, write_series, write_table
from .plot import render_plot

__all__ = ["StageError", "PipelineResult", "run_pipeline", "load_inputs", "stage_arop", "stage_seasonality",
           "stage_filter", "stage_battery", "stage_pca", "stage_svd", "stage_regress", "stage_dfm",
           "stage_comparison"]


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class PipelineResult:
    arop: TimeSeries
    slopes: dict[str, float]
    masks: dict[str, ClassificationMask]
    slope_matrix: dict[str, dict[str, float]]
    outdir: Path
    notes: list[str] = field(default_factory=list)


def load_inputs(cfg: PipelineConfig) -> tuple[SectorPanel, ClassificationMask]:
    panel = load_panel(panel_paths(cfg.panel_dir))
    mask = load_mask(cfg.mask, "criteria") if cfg.mask is not None else criteria_mask()
    report = mask.check(panel)
    if report["missing"]:
        raise ProfitRateError(f"mask has no flag for: {', '.join(report['missing'][:5])}")
    return panel, mask


# ---------------------------------------------------------------- stages

def stage_arop(panel, mask, cfg, out: Path) -> TimeSeries:
    series = compute_arop(panel, mask, cfg.variant, cfg.share_basis)
    write_series(out / "arop.csv", series.years, {"arop": series.values})
    mask.write(out / "mask.csv")
    render_plot(out / "arop.svg", [(series.label, series.years, series.values)], title=series.label)
    return series


def stage_seasonality(series: TimeSeries, cfg, out: Path) -> str:
    table = subperiod_seasonality(series, cfg.window_years)
    recs = table.as_records()
    write_table(out / "seasonality.csv", list(recs[0]), [list(r.values()) for r in recs])
    verdict = additivity_verdict(table)
    write_json(out / "verdict.json", {"additivity": verdict, "window_years": cfg.window_years})
    return verdict


def _decompose(series: TimeSeries, tag: str, cfg):
    if tag == "DW":
        return dwt_mra(series, WaveletSpec(depth_J=cfg.wavelet_depth))
    if tag == "EMD":
        return emd(series, EmdSpec())
    return ehp(series, EhpSpec(draws=cfg.ehp_draws, burn_in=cfg.ehp_burn_in, seed=cfg.seeds["ehp"])).mean_trend


def filter_trends(series: TimeSeries, cfg) -> dict:
    return {tag: _decompose(series, tag, cfg) for tag in cfg.filters}


def stage_filter(series: TimeSeries, cfg, out: Path) -> dict[str, float]:
    decomps = filter_trends(series, cfg)
    write_series(out / "trends.csv", series.years,
                 {"arop": series.values, **{tag: d.trend for tag, d in decomps.items()}})
    for tag, d in decomps.items():
        write_series(out / f"components_{tag}.csv", series.years, {"trend": d.trend, **d.components})
    slopes = {tag: linear_slope(d.trend) for tag, d in decomps.items()}
    write_json(out / "slopes.json", {"ols_slope_per_year": slopes, "arop_slope": linear_slope(series)})
    render_plot(out / "trends.svg", [(series.label, series.years, series.values)]
                + [(f"{tag} trend", series.years, d.trend) for tag, d in decomps.items()], title="Trends")
    return slopes


def stage_battery(series: TimeSeries, out: Path):
    report = battery(series)
    out.mkdir(parents=True, exist_ok=True)
    report.write_csv(out / "grid.csv")
    report.write_json(out / "battery.json")
    return report


def _universe(panel, mask, cfg):
    sectors = included_sectors(panel, mask)
    return sectors, rate_matrix(panel, cfg.variant, sectors, cfg.share_basis)


def _selection_mask(panel, mask, flagged, provenance) -> ClassificationMask:
    excluded = set(mask.excluded()) | set(flagged)
    return ClassificationMask.from_excluded(panel.sectors, excluded, provenance)


def stage_pca(panel, mask, cfg, out: Path) -> dict[str, ClassificationMask]:
    sectors, R = _universe(panel, mask, cfg)
    res = pca(R, True, sectors)
    k = res.retained
    write_table(out / "eigenvalues.csv", ["component", "eigenvalue", "variance_pct", "cumulative_pct"],
                [(i + 1, e, v, c) for i, (e, v, c) in enumerate(zip(res.eigenvalues, res.explained_variance_pct,
                                                                      res.cumulative_pct))])
    write_table(out / "contributions.csv", ["sector"] + [f"Dim{c + 1}" for c in range(k)],
                [[r["sector"]] + [r[f"Dim{c + 1}"] for c in range(k)] for r in res.contribution_table()])
    masks = {}
    for mode in ("simple", "weighted"):
        provenance = f"pca_{mode}"
        if provenance not in cfg.methods:
            continue
        scores = select_sectors(res, mode)
        write_table(out / f"scores_{mode}.csv", ["sector", "score", "flagged"], scores)
        masks[provenance] = _selection_mask(panel, mask, [s for s, _, f in scores if f], provenance)
        masks[provenance].write(out / f"mask_{provenance}.csv")
    write_json(out / "summary.json", {"retained": k, "variables": len(sectors)})
    return masks


def stage_svd(panel, mask, cfg, out: Path):
    _, R = _universe(panel, mask, cfg)
    res = svd_relevance(R)
    write_table(out / "singular_values.csv", ["index", "value"],
                [(i + 1, v) for i, v in enumerate(res.singular_values)])
    write_json(out / "svd.json", {
        "relevant_count": res.relevant_count,
        "quantile_cut": res.quantile_cut,
        "quantiles_20": res.quantiles,
        "distribution": None if res.fit is None else {"family": res.fit.family, "method": res.fit.method,
                                                       "params": res.fit.params, "bic": res.fit.bic},
        "note": res.note,
    })
    return res


def stage_regress(panel, mask, series: TimeSeries, cfg, out: Path) -> ClassificationMask:
    sectors, R = _universe(panel, mask, cfg)
    trace = backward_eliminate(series.values, R, sectors)
    write_table(out / "dropped.csv", ["code", "sector"], trace.codes(sectors))
    write_table(out / "trace.csv", ["step", "dropped", "aic_before", "aic_after"],
                [(i + 1, s.dropped, s.aic_before, s.aic_after) for i, s in enumerate(trace.steps)])
    bw = _selection_mask(panel, mask, trace.dropped, "bw")
    bw.write(out / "mask_bw.csv")
    keep = [sectors.index(s) for s in trace.surviving]
    try:
        report = validate(series.values, R[:, keep], cfg.seeds["split"], 0.8, trace.surviving).to_json()
    except ProfitRateError as exc:
        report = {"skipped": str(exc), "split_seed": cfg.seeds["split"]}
    report["full_model_aic"] = trace.full_aic
    report["final_model_aic"] = trace.final.aic
    write_json(out / "validation.json", report)
    return bw


def stage_dfm(panel, mask, cfg, out: Path) -> ClassificationMask:
    sectors, R = _universe(panel, mask, cfg)
    X = standardize_columns(R, sectors)
    T, N = X.shape
    k_max = min(cfg.dfm_k_max, min(N, T) - 1)
    r, table = dfm_mod.select_factor_count(X, k_max)
    write_table(out / "factor_count.csv", ["k", "V_k", "pc_p3"], zip(table.k, table.V, table.pc_p3))
    r_used = min(r, 6)
    res = pca(X, False, sectors)
    lags = dfm_mod.select_lag_order(res.scores[:, :r_used], cfg.dfm_p_max)
    write_table(out / "lag_order.csv", ["p"] + list(lags.criteria),
                [[p] + [lags.criteria[c][i] for c in lags.criteria] for i, p in enumerate(lags.p)])
    p = lags.selected["SC"]
    fit = dfm_mod.fit_dfm(X, dfm_mod.DfmSpec(r_used, p), seed=cfg.seeds["dfm"], series=sectors)
    write_series(out / "factors.csv", panel.years, {f"F{j + 1}": fit.factors[:, j] for j in range(r_used)})
    rel = dfm_mod.dfm_relevance(fit)
    write_table(out / "relevance.csv", ["sector", "score", "flagged"], rel)
    write_json(out / "fit.json", {"r_selected": r, "r": r_used, "p": p, "iterations": fit.iterations,
                                  "converged": fit.converged, "loglik": fit.loglik_trace[-1],
                                  "r2_mean": fit.r2_summary["mean"], "r2_median": fit.r2_summary["median"]})
    m = _selection_mask(panel, mask, [s for s, _, f in rel if f], "dfm")
    m.write(out / "mask_dfm.csv")
    return m


def stage_comparison(panel, masks: dict[str, ClassificationMask], cfg, out: Path):
    matrix: dict[str, dict[str, float]] = {}
    for name, m in masks.items():
        series = compute_arop(panel, m, cfg.variant, cfg.share_basis)
        matrix[name] = {tag: linear_slope(d.trend) for tag, d in filter_trends(series, cfg).items()}
    tags = list(cfg.filters)
    write_table(out / "slopes.csv", ["mask"] + tags, [[n] + [matrix[n][t] for t in tags] for n in matrix])
    write_table(out / "slope_signs.csv", ["mask"] + tags,
                [[n] + [int(np.sign(matrix[n][t])) for t in tags] for n in matrix])
    return matrix


# ---------------------------------------------------------------- pipeline

def _run(stage, fn, *args):
    try:
        return fn(*args)
    except StageError:
        raise
    except (ProfitRateError, np.linalg.LinAlgError, FloatingPointError, OSError) as exc:
        raise StageError(stage, exc) from exc


def run_pipeline(cfg: PipelineConfig) -> PipelineResult:
    outdir = Path(cfg.outdir)
    scratch = outdir / ".partial"
    if scratch.exists():
        shutil.rmtree(scratch)
    scratch.mkdir(parents=True)
    notes: list[str] = []
    try:
        panel, mask = _run("ingest", load_inputs, cfg)
        series = _run("arop", stage_arop, panel, mask, cfg, scratch / "arop")
        _run("seasonality", stage_seasonality, series, cfg, scratch / "seasonality")
        slopes = _run("filter", stage_filter, series, cfg, scratch / "filter")
        if cfg.battery:
            _run("battery", stage_battery, series, scratch / "battery")
        masks: dict[str, ClassificationMask] = {"criteria": mask}
        if {"pca_simple", "pca_weighted"} & set(cfg.methods):
            masks.update(_run("pca", stage_pca, panel, mask, cfg, scratch / "pca"))
            _run("svd", stage_svd, panel, mask, cfg, scratch / "svd")
        if "bw" in cfg.methods:
            masks["bw"] = _run("regress", stage_regress, panel, mask, series, cfg, scratch / "regress")
        if "dfm" in cfg.methods:
            masks["dfm"] = _run("dfm", stage_dfm, panel, mask, cfg, scratch / "dfm")
        usable = {}
        for name, m in masks.items():
            if any(m.vector(panel)):
                usable[name] = m
            else:
                notes.append(f"{name} selection excludes every sector; left out of the comparison")
        matrix = _run("comparison", stage_comparison, panel, usable, cfg, scratch / "comparison")
        write_json(scratch / "comparison" / "notes.json", {"notes": notes})
    except BaseException:
        shutil.rmtree(scratch, ignore_errors=True)
        raise
    for stage_dir in sorted(scratch.iterdir()):
        target = outdir / stage_dir.name
        if target.exists():
            shutil.rmtree(target)
        stage_dir.rename(target)
    scratch.rmdir()
    write_manifest(outdir)
    return PipelineResult(series, slopes, masks, matrix, outdir, notes)
