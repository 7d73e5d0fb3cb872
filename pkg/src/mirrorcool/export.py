"""Flat-file export of result tables (CSV or JSON) and the matching reader."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

__all__ = ["export", "format_table", "read_table", "profile_rows", "NA"]

NA = "NA"


def _cell(value):
    if value is None:
        return NA
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12e}"
    return str(value)


def _json_value(value):
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def format_table(rows, fmt="csv") -> str:
    """Render a list of same-keyed dicts as CSV text or a JSON array."""
    rows = list(rows)
    if fmt == "json":
        return json.dumps([{k: _json_value(v) for k, v in r.items()} for r in rows],
                          indent=1) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    if rows:
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(list(rows[0]))
        for r in rows:
            writer.writerow([_cell(v) for v in r.values()])
    return buf.getvalue()


def export(rows, path, fmt="csv"):
    """Write ``rows`` to ``path``; I/O failures are re-raised with the path."""
    text = format_table(rows, fmt)
    path = Path(path)
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {fmt} output to {path}: {exc.strerror}") from exc
    return path


def profile_rows(profile):
    return [{"omega": float(w), "magnitude": float(m)}
            for w, m in zip(profile.omegas, profile.magnitudes)]


def _parse(cell):
    if cell == NA:
        return None
    if cell in ("true", "false"):
        return cell == "true"
    try:
        return int(cell)
    except ValueError:
        pass
    try:
        return float(cell)
    except ValueError:
        return cell


def read_table(path):
    """Read a file written by :func:`export` back into a list of dicts."""
    path = Path(path)
    if path.suffix == ".json":
        return json.loads(path.read_text())
    with open(path, newline="") as fh:
        return [{k: _parse(v) for k, v in row.items()} for row in csv.DictReader(fh)]
