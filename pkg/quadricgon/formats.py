"""
formats.py - JSON and CSV output.

JSON is `json.dumps(indent=2)` over plain data with insertion-ordered keys, so equal
reports are equal bytes. Exact rationals are written as "num/den" strings.
CSV columns per command are listed in `CSV_COLUMNS`.
"""

import csv
import io
import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import ParameterError

CSV_COLUMNS = {
    "hilbert": ["a", "b", "h0", "h1", "deg", "rank"],
    "bounds": ["a", "m", "x", "d3_lower", "d3_upper", "d4_lower", "d4_upper", "slope_ok", "genus"],
    "genus-cover": ["g", "a", "x"],
    "asymptotics": ["a", "g", "ratio_low", "ratio_high", "stat_low", "stat_high"],
    "sample-d4": ["trial", "direct_h1", "conclusion", "agree"],
    "sweep": ["file", "status"],
}


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def dumps(payload):
    return json.dumps(to_jsonable(payload), indent=2) + "\n"


def csv_text(command, payload):
    columns = CSV_COLUMNS.get(command)
    if columns is None:
        raise ParameterError(f"csv output is not available for {command}")
    rows = payload.get("rows", payload.get("reports", [payload]))
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: v for k, v in to_jsonable(row).items() if k in columns})
    return buffer.getvalue()


def render(command, payload, fmt="json"):
    if fmt == "json":
        return dumps(payload)
    if fmt == "csv":
        return csv_text(command, payload)
    raise ParameterError(f"unknown format {fmt!r}")


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParameterError(f"cannot read {path}: {exc}")
