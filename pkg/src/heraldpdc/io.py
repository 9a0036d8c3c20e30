"""Deterministic CSV/JSON writers for simulation artifacts."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".12g")


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_csv(path: Path, schema: str, columns, rows) -> Path:
    """CSV with a leading ``# schema=`` comment line, then a header row."""
    path = Path(path)
    lines = [f"# schema={schema}/{SCHEMA_VERSION}", ",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_json(path: Path, schema: str, payload: dict) -> Path:
    path = Path(path)
    doc = {"schema": f"{schema}/{SCHEMA_VERSION}", **_clean(payload)}
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path
