"""Result rows and their CSV/JSON serialisation."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

from .errors import IoFailure

FIELDS = ("experiment", "n", "C", "t", "metric", "value", "bound", "decision")
DECISIONS = ("consistent", "rejected", "info")


@dataclass(frozen=True)
class ResultRow:
    experiment: str
    n: int | None
    C: float | None
    t: float | None
    metric: str
    value: float
    bound: float | None = None
    decision: str = "info"

    def __post_init__(self):
        if self.decision not in DECISIONS:
            raise ValueError(f"unknown decision {self.decision!r}")
        if self.decision != "info":
            expected = "consistent" if self.value <= self.bound else "rejected"
            if expected != self.decision:
                raise ValueError(f"decision {self.decision!r} contradicts value {self.value} vs bound {self.bound}")


def checked_row(experiment, n, C, t, metric, value, bound) -> ResultRow:
    decision = "consistent" if value <= bound else "rejected"
    return ResultRow(experiment, n, C, t, metric, float(value), float(bound), decision)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    return format(float(v), ".17g")


def _check_nan(rows):
    for row in rows:
        for name in ("C", "t", "value", "bound"):
            v = getattr(row, name)
            if isinstance(v, float) and math.isnan(v):
                raise IoFailure(f"NaN in field {name!r} of row {row}")


def render_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(FIELDS)
    for row in rows:
        writer.writerow([_fmt(getattr(row, f)) for f in FIELDS])
    return buf.getvalue()


def render_json(rows) -> str:
    return json.dumps([asdict(r) for r in rows], indent=1) + "\n"


def write_results(rows, path, format: str = "csv") -> None:
    """Write rows as CSV (fixed field order, 17 significant digits) or JSON.

    NaN anywhere aborts with :class:`IoFailure` before the file is touched.
    """
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to write")
    _check_nan(rows)
    if format == "csv":
        text = render_csv(rows)
    elif format == "json":
        text = render_json(rows)
    else:
        raise ValueError(f"unknown format {format!r}")
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def _parse(field, text):
    if field in ("experiment", "metric", "decision"):
        return text
    if text == "":
        return None
    if field == "n":
        return int(text)
    return float(text)


def read_results(path, format: str = "csv") -> list[ResultRow]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    if format == "json":
        return [ResultRow(**obj) for obj in json.loads(text)]
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != FIELDS:
        raise IoFailure(f"unexpected header {reader.fieldnames}")
    return [ResultRow(**{f: _parse(f, rec[f]) for f in FIELDS}) for rec in reader]
