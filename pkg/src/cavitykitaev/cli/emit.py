"""Deterministic JSON and CSV writers for run reports."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from ..errors import SerializationError

SIG_DIGITS = 12


@dataclass
class RunReport:
    workflow: str
    input_hash: str
    results: dict[str, Any]
    conditions: list[dict] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    table: list[dict] | None = None  # rows for CSV output
    columns: list[str] | None = None


def normalize(value: Any, where: str = "report") -> Any:
    """Convert to JSON-ready values with numbers rounded to 12 significant digits."""
    if isinstance(value, dict):
        return {str(k): normalize(v, f"{where}.{k}") for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [normalize(v, f"{where}[{i}]") for i, v in enumerate(value)]
    if isinstance(value, np.ndarray):
        return normalize(value.tolist(), where)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if math.isnan(x):
            raise SerializationError(f"NaN at {where}")
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return float(f"{x:.{SIG_DIGITS}g}")
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": normalize(value.real, where), "im": normalize(value.imag, where)}
    if value is None or isinstance(value, str):
        return value
    raise SerializationError(f"cannot serialize {type(value).__name__} at {where}")


def to_json(report: RunReport) -> str:
    doc = {
        "workflow": report.workflow,
        "input_hash": report.input_hash,
        "results": report.results,
        "conditions": report.conditions,
        "warnings": report.warnings,
    }
    return json.dumps(normalize(doc), sort_keys=True, indent=2) + "\n"


def _cell(value: Any) -> str:
    v = normalize(value)
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.{SIG_DIGITS}g}"
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def _flatten(prefix: str, value: Any, out: list[tuple[str, Any]]):
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten(f"{prefix}.{k}" if prefix else str(k), value[k], out)
    else:
        out.append((prefix, value))


def to_csv(report: RunReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if report.table is not None:
        columns = report.columns or (sorted(report.table[0]) if report.table else [])
        writer.writerow(columns)
        for row in report.table:
            writer.writerow([_cell(row.get(c)) for c in columns])
    else:
        writer.writerow(["key", "value"])
        pairs: list[tuple[str, Any]] = []
        _flatten("", report.results, pairs)
        for k, v in pairs:
            writer.writerow([k, _cell(v)])
    return buf.getvalue()


def emit(report: RunReport, fmt: str, out_dir: str | Path) -> list[Path]:
    """Write ``<workflow>.<fmt>`` into ``out_dir`` and return the written paths."""
    if fmt not in ("json", "csv"):
        raise ValueError(f"unknown format {fmt!r}")
    text = to_json(report) if fmt == "json" else to_csv(report)  # serialise before touching disk
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{report.workflow}.{fmt}"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return [path]
