"""Deterministic CSV/JSON writers and the per-stage manifest."""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

__all__ = ["fmt", "write_table", "write_json", "write_series", "read_series", "write_manifest", "sha256"]


def fmt(value) -> str:
    """12 significant digits, locale independent; ints and strings pass through."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if np.isnan(v):
            return "nan"
        if np.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.12g}"
    return str(value)


def write_table(path: Path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return float(fmt(v)) if np.isfinite(v) else fmt(v)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path: Path, payload) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def write_series(path: Path, years, columns: dict) -> Path:
    """Wide year-indexed table: ``year`` then one column per named series."""
    names = list(columns)
    rows = ([int(y)] + [columns[n][i] for n in names] for i, y in enumerate(years))
    return write_table(path, ["year"] + names, rows)


def read_series(path) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = [row for row in reader if row]
    years = np.array([int(r[0]) for r in data])
    cols = {name: np.array([float(r[j]) for r in data]) for j, name in enumerate(header[1:], start=1)}
    return years, cols


def sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(root: Path) -> Path:
    """``manifest.json`` in ``root`` listing every file below it with its hash."""
    root = Path(root)
    files = sorted(p for p in root.rglob("*") if p.is_file() and p.name != "manifest.json")
    entries = [{"path": p.relative_to(root).as_posix(), "sha256": sha256(p), "bytes": p.stat().st_size}
               for p in files]
    return write_json(root / "manifest.json", {"files": entries})
