import numpy as np
import pytest

from profitrate.arop import (ClassificationMask, RateVariant, SectorPanel, compute_arop, criteria_mask,
                             disaggregate_capital, load_mask, load_panel, rate_matrix, sector_rates, write_panel)
from profitrate.core import ProfitRateError
from profitrate.synthetic import declining_panel


def tiny_panel(**overrides):
    kw = dict(
        sectors=("A", "B"), start_year=2000,
        surplus=np.array([[2.0], [0.8]]), depreciation=np.array([[0.5], [0.4]]),
        compensation=np.array([[1.0], [1.0]]), value_added=np.array([[3.0], [1.0]]),
        total_capital_stock=np.array([10.0]), total_intermediate_consumption=np.array([2.0]),
    )
    kw.update(overrides)
    return SectorPanel(**kw)


def test_disaggregation_hand_values():
    C = disaggregate_capital(tiny_panel())
    assert np.allclose(C[:, 0], [9.0, 3.0], atol=1e-14)


def test_disaggregation_sums_to_total():
    p = declining_panel()
    C = disaggregate_capital(p)
    total = p.total_capital_stock + p.total_intermediate_consumption
    assert np.max(np.abs(C.sum(axis=0) / total - 1)) < 1e-9


def test_zero_value_added_names_year():
    p = tiny_panel(value_added=np.array([[0.0], [0.0]]))
    with pytest.raises(ProfitRateError, match="2000"):
        disaggregate_capital(p)


def test_arop_hand_values():
    p = tiny_panel()
    m = ClassificationMask.include_all(p.sectors)
    assert compute_arop(p, m, RateVariant("net", "weighted")).values[0] == pytest.approx(1.9 / 14, abs=1e-15)
    assert compute_arop(p, m, RateVariant("gross", "weighted")).values[0] == pytest.approx(0.2, abs=1e-15)
    assert compute_arop(p, m, RateVariant("net", "unweighted")).values[0] == pytest.approx(0.125, abs=1e-15)


def test_single_sector_mask_gives_sector_rate():
    p = tiny_panel()
    m = ClassificationMask.from_excluded(p.sectors, ["B"], "criteria")
    assert compute_arop(p, m).values[0] == pytest.approx(0.15, abs=1e-15)


def test_weighted_arop_is_convex_combination():
    p = declining_panel()
    rates, _ = sector_rates(p)
    s = compute_arop(p, ClassificationMask.include_all(p.sectors))
    assert np.all(s.values >= rates.min(axis=0) - 1e-12)
    assert np.all(s.values <= rates.max(axis=0) + 1e-12)


def test_empty_mask_errors():
    p = tiny_panel()
    with pytest.raises(ProfitRateError, match="no sectors"):
        compute_arop(p, ClassificationMask.from_excluded(p.sectors, ["A", "B"], "criteria"))


def test_zero_denominator_names_sector_and_year():
    p = tiny_panel(value_added=np.array([[1.0], [0.0]]), compensation=np.array([[1.0], [0.0]]))
    with pytest.raises(ProfitRateError, match="'B' in 2000"):
        compute_arop(p, ClassificationMask.include_all(p.sectors))


def test_all_mask_must_include_everything():
    with pytest.raises(ProfitRateError):
        ClassificationMask({"a": 1, "b": 0}, "all")


def test_bundled_criteria_mask():
    m = criteria_mask()
    assert len(m.flags) == 47
    assert len(m.excluded()) == 11
    names = [m.labels[k] for k in m.flags]
    assert names[31] == "Finance and insurance"
    assert m.flag("Finance and insurance") == 0
    assert m.flag("Farms") == 1


def test_load_mask_rejects_duplicates(tmp_path):
    f = tmp_path / "m.csv"
    f.write_text("sector,flag\nFarms,1\nfarms ,0\n")
    with pytest.raises(ProfitRateError, match="duplicate"):
        load_mask(f)


def test_load_mask_rejects_bad_flag(tmp_path):
    f = tmp_path / "m.csv"
    f.write_text("sector,flag\nFarms,2\n")
    with pytest.raises(ProfitRateError, match="0 or 1"):
        load_mask(f)


def test_mask_check_reports_unknown_and_missing():
    p = tiny_panel()
    m = ClassificationMask({"A": 1, "Z": 0})
    rep = m.check(p)
    assert rep == {"missing": ["B"], "unknown": ["Z"]}


def test_panel_csv_roundtrip(tmp_path):
    p = declining_panel()
    q = load_panel(write_panel(p, tmp_path))
    assert q.sectors == p.sectors and q.start_year == p.start_year
    for name in ("surplus", "depreciation", "compensation", "value_added"):
        a, b = getattr(p, name), getattr(q, name)
        assert np.max(np.abs(a - b) / np.abs(a).clip(1e-300)) < 1e-11


def test_rate_matrix_shape():
    p = declining_panel()
    R = rate_matrix(p, sectors=["Farms", "Utilities"])
    assert R.shape == (61, 2)


def test_synthetic_panel_declines():
    p = declining_panel()
    s = compute_arop(p, criteria_mask())
    assert s.values[-1] < s.values[0]
    assert len(s) == 61 and s.start_year == 1960
