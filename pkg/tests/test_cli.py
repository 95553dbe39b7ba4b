import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from profitrate import bundled_synthetic_dir
from profitrate.arop import ClassificationMask, criteria_mask, load_panel
from profitrate.cli import main, render_plot, run_pipeline
from profitrate.cli.config import ConfigError, load_config, panel_paths
from profitrate.cli.io import fmt, read_series, sha256, write_series

SVG = "{http://www.w3.org/2000/svg}"


def write_config(tmp_path, outdir="out", methods="pca_simple, pca_weighted, bw, dfm", mask=None, extra="",
                 seeds="ehp = 0\nsplit = 0\ndfm = 0\n", draws=600, filters="DW, EMD, EHP", battery="yes"):
    lines = ["[input]", f"panel_dir = {bundled_synthetic_dir()}"]
    if mask:
        lines.append(f"mask = {mask}")
    lines += ["[filters]", f"run = {filters}", f"ehp_draws = {draws}", "ehp_burn_in = 100",
              "[battery]", f"enabled = {battery}",
              "[selection]", f"methods = {methods}",
              "[seeds]", seeds, "[output]", f"dir = {outdir}", extra]
    p = tmp_path / "run.ini"
    p.write_text("\n".join(lines) + "\n")
    return p


def test_fmt_twelve_significant_digits():
    assert fmt(1 / 3) == "0.333333333333"
    assert fmt(7) == "7"
    assert fmt(float("inf")) == "inf"


def test_csv_roundtrip_within_1e_12(tmp_path, rng):
    vals = rng.standard_normal(50) * 10.0 ** rng.integers(-6, 6, 50)
    write_series(tmp_path / "s.csv", np.arange(1960, 2010), {"x": vals})
    years, cols = read_series(tmp_path / "s.csv")
    assert np.array_equal(years, np.arange(1960, 2010))
    assert np.max(np.abs(cols["x"] - vals) / np.abs(vals)) < 1e-11


def test_pipeline_outputs_and_manifest(tmp_path):
    res = run_pipeline(load_config(write_config(tmp_path)))
    out = tmp_path / "out"
    for stage in ("arop", "seasonality", "filter", "battery", "pca", "svd", "regress", "dfm", "comparison"):
        assert (out / stage).is_dir()
    assert not (out / ".partial").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    for entry in manifest["files"]:
        assert sha256(out / entry["path"]) == entry["sha256"]
    assert set(res.slope_matrix) == {"criteria", "pca_simple", "pca_weighted", "bw", "dfm"}
    assert all(v < 0 for v in res.slopes.values())


def test_pipeline_byte_identical_reruns(tmp_path):
    cfg = load_config(write_config(tmp_path, methods="bw"))
    run_pipeline(cfg)
    first = (tmp_path / "out" / "manifest.json").read_bytes()
    run_pipeline(cfg)
    assert (tmp_path / "out" / "manifest.json").read_bytes() == first


def test_emitted_csvs_roundtrip(tmp_path):
    run_pipeline(load_config(write_config(tmp_path, methods="bw")))
    years, cols = read_series(tmp_path / "out" / "arop" / "arop.csv")
    panel = load_panel(panel_paths(bundled_synthetic_dir()))
    from profitrate.arop import compute_arop
    expect = compute_arop(panel, criteria_mask()).values
    assert np.max(np.abs(cols["arop"] - expect)) < 1e-12


def test_all_ones_mask_filters_only(tmp_path):
    panel = load_panel(panel_paths(bundled_synthetic_dir()))
    mpath = tmp_path / "all.csv"
    ClassificationMask.include_all(panel.sectors).write(mpath)
    res = run_pipeline(load_config(write_config(tmp_path, methods="", mask=mpath, battery="no")))
    years, cols = read_series(tmp_path / "out" / "filter" / "trends.csv")
    assert list(cols) == ["arop", "DW", "EMD", "EHP"]
    assert list(res.slope_matrix) == ["criteria"]
    assert not (tmp_path / "out" / "battery").exists()


def test_missing_seed_is_config_error(tmp_path):
    with pytest.raises(ConfigError, match="seeds"):
        load_config(write_config(tmp_path, seeds="ehp = 0"))


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["pipeline", "--config", str(tmp_path / "nope.ini")]) == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("sector,flag\nFarms,3\n")
    assert main(["pipeline", "--config", str(write_config(tmp_path, mask=bad))]) == 3
    assert "error" in capsys.readouterr().err


def test_failed_stage_leaves_no_partial_output(tmp_path):
    panel = load_panel(panel_paths(bundled_synthetic_dir()))
    mpath = tmp_path / "none.csv"
    ClassificationMask.from_excluded(panel.sectors, panel.sectors, "criteria").write(mpath)
    code = main(["pipeline", "--config", str(write_config(tmp_path, mask=mpath))])
    assert code == 3
    out = tmp_path / "out"
    assert not out.exists() or not any(out.iterdir())


def test_stage_subcommands(tmp_path):
    d = str(bundled_synthetic_dir())
    for cmd in (["ingest-check"], ["arop"], ["seasonality"], ["battery"], ["regress"],
                ["filter", "--draws", "300", "--burn-in", "50"]):
        assert main(cmd + ["--panel-dir", d, "--outdir", str(tmp_path / "o")]) == 0
    for stage in ("ingest", "arop", "seasonality", "battery", "regress", "filter"):
        assert (tmp_path / "o" / stage).is_dir()
    assert (tmp_path / "o" / "manifest.json").is_file()


def test_make_synthetic_matches_bundled(tmp_path):
    assert main(["make-synthetic", "--outdir", str(tmp_path / "p")]) == 0
    for name, path in panel_paths(tmp_path / "p").items():
        assert path.read_bytes() == panel_paths(bundled_synthetic_dir())[name].read_bytes()


def test_plot_single_series(tmp_path):
    p = render_plot(tmp_path / "a.svg", [("ARoP", [2000, 2001, 2002], [0.2, 0.19, 0.18])])
    root = ET.parse(p).getroot()
    assert len(root.findall(f".//{SVG}polyline")) == 1


def test_plot_deterministic(tmp_path):
    series = [("ARoP", np.arange(1960, 2021), np.linspace(0.25, 0.12, 61))]
    a = render_plot(tmp_path / "a.svg", series).read_bytes()
    b = render_plot(tmp_path / "b.svg", series).read_bytes()
    assert a == b


def test_plot_overlay_legend(tmp_path):
    yrs = np.arange(1960, 1970)
    p = render_plot(tmp_path / "c.svg", [("rate", yrs, np.arange(10.0)), ("EHP trend", yrs, np.arange(10.0) * 0.9)])
    root = ET.parse(p).getroot()
    lines = root.findall(f".//{SVG}polyline")
    legend = [t.text for g in root.findall(f".//{SVG}g[@class='legend']") for t in g.findall(f"{SVG}text")]
    assert len(lines) == 2
    assert legend == ["rate", "EHP trend"]


def test_plot_empty_input(tmp_path):
    with pytest.raises(ValueError):
        render_plot(tmp_path / "e.svg", [])
    with pytest.raises(ValueError):
        render_plot(tmp_path / "e.svg", [("x", [], [])])


def test_plot_subcommand(tmp_path):
    write_series(tmp_path / "s.csv", [2000, 2001, 2002], {"a": [1.0, 2.0, 1.5], "b": [1.1, 1.6, 1.4]})
    assert main(["plot", "--series", str(tmp_path / "s.csv"), "--out", str(tmp_path / "s.svg")]) == 0
    assert len(ET.parse(tmp_path / "s.svg").getroot().findall(f".//{SVG}polyline")) == 2
