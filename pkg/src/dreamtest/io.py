"""CSV ingestion and report emission.

Reports are written either as a JSON object tagged with
``"schema": "dream-report/1"`` or as CSV rows.  Numbers are written with
``repr`` so a CSV round trip reproduces every float exactly.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
import json
import logging
import math
from pathlib import Path
import sys
from typing import Iterable, Sequence

import numpy as np

from .exceptions import ConfigError, DataError
from .significance import TestReport
from .simulation import PowerResult, Sample

SCHEMA = "dream-report/1"
MISSING = frozenset({"", "na", "nan", "n/a", "null", "none", "."})
POWER_COLUMNS = ("example", "n", "a", "sigma", "method", "rate", "mc_se", "reps", "seed")
REPORT_COLUMNS = (
    "method",
    "statistic",
    "raw_statistic",
    "standardized",
    "variance_estimate",
    "p_value",
    "n",
    "q1",
    "q_hat",
    "h",
    "h1",
    "bootstrap_reps",
    "seed",
)

log = logging.getLogger(__name__)


@dataclass
class IngestResult:
    sample: Sample
    dropped: int
    columns: dict[str, list[str]]


def _resolve(selector, header: Sequence[str], role: str) -> int:
    if isinstance(selector, int):
        idx = selector
    elif selector in header:
        return header.index(selector)
    else:
        try:
            idx = int(selector)
        except ValueError:
            raise ConfigError(f"{role} column {selector!r} is not in the header {list(header)}") from None
    if not 0 <= idx < len(header):
        raise ConfigError(f"{role} column index {idx} is out of range for {len(header)} columns")
    return idx


def _selectors(value) -> list:
    if value is None:
        return []
    if isinstance(value, (str, int)):
        value = [value]
    out = []
    for item in value:
        if isinstance(item, str):
            out.extend(s.strip() for s in item.split(",") if s.strip())
        else:
            out.append(item)
    return out


def ingest_csv(path, x_cols, w_cols, y_col) -> IngestResult:
    """Read ``X``, ``W`` and ``Y`` from a headed CSV file.

    Selectors are column names or 0-based indices (comma-separated strings
    are split).  Rows with a missing value in any selected column are
    dropped and counted; any other non-numeric cell is an error naming its
    line and column.
    """
    path = Path(path)
    xs, ws = _selectors(x_cols), _selectors(w_cols)
    ys = _selectors(y_col)
    if not xs or not ws:
        raise ConfigError("both the X and the W column selections must be non-empty")
    if len(ys) != 1:
        raise ConfigError(f"exactly one response column is required, got {ys}")
    try:
        handle = path.open(newline="", encoding="utf-8-sig")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc.strerror or exc}") from exc
    with handle:
        reader = csv.reader(handle)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path} is empty") from None
        xi = [_resolve(s, header, "X") for s in xs]
        wi = [_resolve(s, header, "W") for s in ws]
        yi = _resolve(ys[0], header, "Y")
        roles = {}
        for role, idxs in (("X", xi), ("W", wi), ("Y", [yi])):
            for i in idxs:
                if i in roles:
                    raise ConfigError(f"column {header[i]!r} is selected for both {roles[i]} and {role}")
                roles[i] = role
        wanted = xi + wi + [yi]
        rows = []
        dropped = 0
        for line_no, record in enumerate(reader, start=2):
            if not record or all(not cell.strip() for cell in record):
                continue
            if len(record) < len(header):
                raise DataError(f"{path}:{line_no}: expected {len(header)} fields, found {len(record)}")
            values = []
            missing = False
            for i in wanted:
                cell = record[i].strip()
                if cell.lower() in MISSING:
                    missing = True
                    break
                try:
                    v = float(cell)
                except ValueError:
                    raise DataError(
                        f"{path}:{line_no}: column {header[i]!r} has non-numeric value {cell!r}"
                    ) from None
                if not math.isfinite(v):
                    missing = True
                    break
                values.append(v)
            if missing:
                dropped += 1
                continue
            rows.append(values)
    if dropped:
        log.warning("dropped %d row(s) of %s with missing values", dropped, path)
    if not rows:
        raise DataError(f"{path} has no complete rows in the selected columns")
    data = np.array(rows)
    p1, p2 = len(xi), len(wi)
    sample = Sample(data[:, :p1], data[:, p1 : p1 + p2], data[:, -1])
    names = {"X": [header[i] for i in xi], "W": [header[i] for i in wi], "Y": [header[yi]]}
    return IngestResult(sample, dropped, names)


def _report_row(report: TestReport) -> dict:
    d = report.to_dict()
    h, h1 = d.pop("bandwidths")
    d["h"], d["h1"] = h, h1
    return {k: d.get(k) for k in REPORT_COLUMNS}


def _jsonable(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


def _payload(obj, meta):
    items = obj if isinstance(obj, (list, tuple)) else [obj]
    if not items:
        raise ConfigError("nothing to emit")
    if all(isinstance(i, TestReport) for i in items):
        body = {"kind": "test", "reports": [i.to_dict() for i in items]}
        rows = [_report_row(i) for i in items]
        columns = REPORT_COLUMNS
    elif all(isinstance(i, PowerResult) for i in items):
        body = {"kind": "power", "results": [i.to_dict() for i in items]}
        rows = [row for i in items for row in i.rows()]
        columns = POWER_COLUMNS
    else:
        raise ConfigError("can only emit TestReport or PowerResult objects")
    out = {"schema": SCHEMA, **body}
    if meta:
        out["config"] = meta
    return _jsonable(out), rows, columns


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_report(obj, fmt: str = "json", path=None, meta: dict | None = None) -> None:
    """Write reports or power results as JSON or CSV to ``path`` (stdout when ``None`` or ``-``)."""
    if fmt not in ("json", "csv"):
        raise ConfigError(f"unknown output format {fmt!r}")
    payload, rows, columns = _payload(obj, meta)
    to_stdout = path is None or str(path) == "-"
    try:
        handle = sys.stdout if to_stdout else open(path, "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write report to {path}: {exc.strerror}", str(path)) from exc
    try:
        if fmt == "json":
            json.dump(payload, handle, indent=2, sort_keys=False)
            handle.write("\n")
        else:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_cell(row.get(c)) for c in columns])
    finally:
        if not to_stdout:
            handle.close()


def _number(text: str):
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_rows(path) -> list[dict]:
    """Read a CSV written by :func:`emit_report` back into typed dicts."""
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            return [{k: _number(v) for k, v in row.items()} for row in csv.DictReader(handle)]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from exc


def write_statistics(results: Iterable[PowerResult], path) -> None:
    """Per-replication statistics and p-values, one JSON record per design point."""
    records = []
    for r in results:
        if r.statistics is None:
            raise ConfigError("power results were computed without keep_statistics=True")
        records.append(_jsonable(r.to_dict(include_statistics=True)))
    try:
        with open(path, "w", encoding="utf-8") as handle:
            json.dump({"schema": SCHEMA, "kind": "replications", "results": records}, handle)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write statistics to {path}: {exc.strerror}", str(path)) from exc
