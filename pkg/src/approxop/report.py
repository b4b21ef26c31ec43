"""CSV / JSON serialization of ExperimentReports."""

from __future__ import annotations

import csv
import io
import json
import math
import sys

from approxop.experiments import ExperimentReport

__all__ = ["COLUMNS", "emit_report", "to_csv", "to_json"]

COLUMNS = ("experiment", "n", "beta", "x", "measured", "reference", "bound",
           "residual_mass", "order")


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _json_value(v):
    if isinstance(v, float):
        return v if math.isfinite(v) else None
    return v


def to_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in report.rows:
        writer.writerow([_csv_cell(getattr(row, c)) for c in COLUMNS])
    return buf.getvalue()


def to_json(report: ExperimentReport) -> str:
    # json writes floats with repr, the shortest string that round-trips
    doc = {
        "schema_version": report.schema_version,
        "rows": [{c: _json_value(getattr(r, c)) for c in COLUMNS} for r in report.rows],
    }
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def emit_report(report: ExperimentReport, fmt="csv", path=None) -> int:
    """Write ``report`` to ``path`` (stdout when None); returns an exit status.

    Raises OSError when the path cannot be written.
    """
    if fmt == "csv":
        text = to_csv(report)
    elif fmt == "json":
        text = to_json(report)
    else:
        raise ValueError(f"format must be csv or json, got {fmt!r}")
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return 0
