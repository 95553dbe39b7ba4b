"""Unit-root test battery: 3 ADF, 6 ERS, 4 KPSS and 4 PP variants at three levels."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

from .critical import LEVELS
from .unitroot import TestResult, adf, dfgls, ers_pt, kpss, pp

__all__ = ["TestResult", "TestReport", "VARIANTS", "battery", "adf", "dfgls", "ers_pt", "kpss", "pp", "LEVELS"]

# Canonical row order.  The six ERS rows pair (DF-GLS constant, DF-GLS trend,
# point-optimal with trend) with no lag augmentation and with AIC-chosen
# augmentation / AR long-run variance for the "residual autocorrelation" rows.
VARIANTS = (
    ("ADF", "No Drift or Deterministic Trend", lambda y: adf(y, "none")),
    ("ADF", "Drift but No Deterministic Trend", lambda y: adf(y, "drift")),
    ("ADF", "Drift and Deterministic Trend", lambda y: adf(y, "drift_and_trend")),
    ("ERS", "Constant Mean", lambda y: dfgls(y, "c", 0)),
    ("ERS", "Linear Trend", lambda y: dfgls(y, "ct", 0)),
    ("ERS", "Constant Mean and Linear Trend", lambda y: ers_pt(y, "ct", 0)),
    ("ERS", "Constant Mean Influenced by Residual Auto-correlation", lambda y: dfgls(y, "c", "auto_aic")),
    ("ERS", "Linear Trend Influenced by Residual Auto-correlation", lambda y: dfgls(y, "ct", "auto_aic")),
    ("ERS", "Constant Mean and Linear Trend Influenced by Residual Autocorrelation",
     lambda y: ers_pt(y, "ct", "auto_aic")),
    ("KPSS", "Short Lags around a Random Walk", lambda y: kpss(y, "level", "short")),
    ("KPSS", "Short Lags around a Deterministic Trend", lambda y: kpss(y, "trend", "short")),
    ("KPSS", "Long Lags around a Random Walk", lambda y: kpss(y, "level", "long")),
    ("KPSS", "Long Lags around a Deterministic Trend", lambda y: kpss(y, "trend", "long")),
    ("PP", "Short Lags with Z(alpha)", lambda y: pp(y, "Z_alpha", "short")),
    ("PP", "Short Lags with Z(t)", lambda y: pp(y, "Z_t", "short")),
    ("PP", "Long Lags with Z(alpha)", lambda y: pp(y, "Z_alpha", "long")),
    ("PP", "Long Lags with Z(t)", lambda y: pp(y, "Z_t", "long")),
)


@dataclass
class TestReport:
    rows: list[TestResult]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(LEVELS)

    def grid(self) -> list[list[str]]:
        return [[r.verdict[lvl] for lvl in LEVELS] for r in self.rows]

    def count(self, verdict: str = "non_stationary") -> int:
        return sum(v == verdict for row in self.grid() for v in row)

    def yes_no(self) -> list[list[str]]:
        """Verdicts rendered as Yes (stationary) / No."""
        return [["Yes" if v == "stationary" else "No" for v in row] for row in self.grid()]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["family", "variation"] + [f"level_{lvl:g}" for lvl in LEVELS])
            for r, yn in zip(self.rows, self.yes_no()):
                w.writerow([r.family, r.variation] + yn)

    def to_json(self) -> dict:
        return {
            "rows": [
                {
                    "family": r.family,
                    "variation": r.variation,
                    "statistic": r.statistic,
                    "critical_values": {f"{k:g}": v for k, v in r.critical_values.items()},
                    "verdict": {f"{k:g}": v for k, v in r.verdict.items()},
                    "lags": r.lags,
                    "nobs": r.nobs,
                }
                for r in self.rows
            ],
            "non_stationary_cells": self.count("non_stationary"),
            "total_cells": self.shape[0] * self.shape[1],
        }

    def write_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)


def battery(series) -> TestReport:
    """Run all 17 variants in canonical order."""
    rows = []
    for family, label, run in VARIANTS:
        res = run(series)
        res.family, res.variation = family, label
        rows.append(res)
    return TestReport(rows)
