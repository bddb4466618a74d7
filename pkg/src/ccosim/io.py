"""Table output in fixed-precision CSV or JSON."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np


def fmt_value(v):
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.8e}"
    return v


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(f"{float(v):.8e}")
    return v


def write_table(out_dir, name: str, header, rows, fmt: str = "csv") -> Path:
    """Write ``rows`` as ``name``.csv or ``name``.json under ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        path = out_dir / f"{name}.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for r in rows:
                w.writerow([fmt_value(v) for v in r])
    elif fmt == "json":
        path = out_dir / f"{name}.json"
        records = [{h: _json_value(v) for h, v in zip(header, r)} for r in rows]
        path.write_text(json.dumps(records, indent=2) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return path


def write_json(out_dir, name: str, obj) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_json_value) + "\n")
    return path
