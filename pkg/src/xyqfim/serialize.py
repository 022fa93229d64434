"""CSV / JSON serialization of scan rows."""

from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Mapping, Sequence

import numpy as np


def format_value(v: object) -> str:
    """CSV cell text: 17 significant digits for reals, ``true``/``false`` for flags."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating, int, np.integer)):
        f = float(v)
        if math.isnan(f):
            return "nan"
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f"{f:.16e}"
    return str(v)


def to_csv(rows: Sequence[Mapping[str, object]], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row[c]) for c in columns])
    return buf.getvalue()


def _jsonable(v: object) -> object:
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (float, np.floating, int, np.integer)):
        f = float(v)
        return f if math.isfinite(f) else None
    if isinstance(v, Mapping):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    return v


def to_json(rows: Sequence[Mapping[str, object]] | Mapping[str, object], columns: Sequence[str] | None = None) -> str:
    """JSON text; non-finite reals become ``null``. With ``columns`` each row is restricted and ordered."""
    if columns is not None:
        rows = [{c: r[c] for c in columns} for r in rows]
    return json.dumps(_jsonable(rows), indent=2, allow_nan=False) + "\n"
