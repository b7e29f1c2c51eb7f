"""Writing results as CSV tables and JSON documents.

CSV files follow RFC 4180: a header row, CRLF line ends and quoting only
where a field needs it.  Floats are written with ``repr`` so that equal
inputs give byte-identical files.  JSON documents always carry
``schema_version``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .errors import IoError
from .profile import SCHEMA_VERSION, RadialProfile


def to_plain(obj):
    """Recursively turn numpy values, enums and non-finite floats into JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, np.generic):
        return to_plain(obj.item())
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if hasattr(obj, "to_dict"):
        return to_plain(obj.to_dict())
    return obj


def json_text(document: dict) -> str:
    doc = {"schema_version": SCHEMA_VERSION, **to_plain(document)}
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _cell(value) -> str:
    value = to_plain(value)
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, dict)):
        return json.dumps(value, sort_keys=True)
    return str(value)


def csv_text(rows, columns=None) -> str:
    """Render ``rows`` (mappings) with a fixed column order.

    Without ``columns`` the order is that of the first row followed by
    keys first seen in later rows.
    """
    rows = list(rows)
    if columns is None:
        columns = []
        for row in rows:
            columns += [k for k in row if k not in columns]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def profiles_table(profiles: list[RadialProfile]) -> list[dict]:
    """Rows ``t, value`` (one profile) or ``t, value_1, ...`` on a common grid."""
    t = profiles[0].t_grid
    if len(profiles) == 1:
        return [{"t": float(ti), "value": float(v)} for ti, v in zip(t, profiles[0].values)]
    return [{"t": float(t[i]), **{f"value_{j + 1}": float(pr.values[i]) for j, pr in enumerate(profiles)}}
            for i in range(t.size)]


def _write(path: Path, text: str):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc.strerror or exc}") from None


def emit_report(results, path=None, fmt: str | None = None, columns=None, header: dict | None = None) -> str:
    """Write ``results`` to ``path`` (or return the text when ``path`` is None).

    ``results`` is a mapping (JSON document), a list of mappings (CSV rows)
    or a list of :class:`RadialProfile`.  ``fmt`` defaults to the file
    suffix.  CSV tables of profiles get a ``<path>.json`` header sidecar
    built from ``header`` and the first profile's metadata.
    """
    if fmt is None:
        fmt = Path(path).suffix.lstrip(".").lower() if path else "json"
        fmt = fmt if fmt in ("csv", "json") else "json"
    is_profiles = isinstance(results, list) and results and isinstance(results[0], RadialProfile)
    if fmt == "json":
        if is_profiles:
            results = {"profiles": [{"t": p.t_grid, "values": p.values, **p.header()} for p in results]}
        elif isinstance(results, list):
            results = {"rows": results}
        text = json_text({**(header or {}), **results})
    elif fmt == "csv":
        if isinstance(results, dict):
            results = [results]
        text = csv_text(profiles_table(results) if is_profiles else results, columns)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        path = Path(path)
        _write(path, text)
        if fmt == "csv" and (is_profiles or header):
            side = {**(results[0].header() if is_profiles else {}), **(header or {})}
            _write(path.with_suffix(path.suffix + ".json"), json_text(side))
    return text
