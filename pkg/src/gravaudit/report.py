"""CSV and JSON report writers. Output is byte-stable for identical inputs."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SCHEMA_VERSION = "1.0"
CSV_COLUMNS = ("name", "mode", "re", "im", "abs", "meta")


@dataclass
class Rows:
    rows: list = field(default_factory=list)

    def add(self, name: str, mode: str, value, meta: str = ""):
        z = complex(value)
        self.rows.append((name, mode, z.real, z.imag, abs(z), meta))


def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, (float, np.floating)) else str(x)


def to_csv(rows: Rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows.rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def jsonable(obj):
    """Convert numpy/complex containers to plain JSON types; complex -> [re, im]."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if x != x or x in (float("inf"), float("-inf")):
            return str(x)
        return x
    return obj


def to_json(payload: dict) -> str:
    return json.dumps(jsonable(payload), indent=2, sort_keys=True) + "\n"


def write_reports(out_dir, stem: str, rows: Rows, payload: dict, formats) -> list:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in formats:
        path = out / f"{stem}.csv"
        path.write_text(to_csv(rows), encoding="utf-8")
        written.append(path)
    if "json" in formats:
        path = out / f"{stem}.json"
        path.write_text(to_json(payload), encoding="utf-8")
        written.append(path)
    return written


def schema_path() -> Path:
    return Path(__file__).with_name("report_schema.json")
