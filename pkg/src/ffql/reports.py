"""CSV and JSON emission with a fixed column order and fixed float formatting."""

from __future__ import annotations

import io
import json
import math
from typing import Iterable, Sequence

MOMENT_COLUMNS = ("family", "q", "g", "k", "l", "empirical", "main", "normalized_error")


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return "%.15g" % v
    return str(v)


def to_csv(rows: Iterable[dict], columns: Sequence[str] | None = None) -> str:
    rows = list(rows)
    if columns is None:
        columns = list(rows[0]) if rows else []
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for r in rows:
        buf.write(",".join(_csv_cell(fmt(r.get(c))) for c in columns) + "\n")
    return buf.getvalue()


def _csv_cell(s: str) -> str:
    return '"' + s.replace('"', '""') + '"' if ("," in s or '"' in s or "\n" in s) else s


def _jsonable(v):
    if isinstance(v, float):
        return float(fmt(v)) if math.isfinite(v) else fmt(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, complex):
        return {"re": _jsonable(v.real), "im": _jsonable(v.imag)}
    if hasattr(v, "item"):  # numpy scalar
        return _jsonable(v.item())
    return v


def to_json(payload) -> str:
    return json.dumps(_jsonable(payload), indent=2, sort_keys=False) + "\n"
