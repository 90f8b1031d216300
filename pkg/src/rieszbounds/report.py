"""Report containers and serialisation.

Floats are written with 17 significant digits so reports round-trip
exactly; non-finite values become ``null`` in JSON and empty cells in CSV.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import __version__

REPORT_SCHEMA = {
    "type": "object",
    "required": ["command", "params", "seed", "records", "summary"],
    "properties": {
        "header": {"type": "object"},
        "command": {"type": "string"},
        "params": {"type": "object"},
        "seed": {"type": ["integer", "null"]},
        "records": {"type": "array", "items": {"type": "object"}},
        "summary": {
            "type": "object",
            "required": ["pass_count", "fail_count", "min_margin_log"],
            "properties": {
                "pass_count": {"type": "integer", "minimum": 0},
                "fail_count": {"type": "integer", "minimum": 0},
                "min_margin_log": {"type": ["number", "null"]},
            },
        },
    },
}


def format_float(x) -> str:
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return "%.17g" % x


def _plain(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, tuple):
        return list(obj)
    return obj


def dumps(obj, indent: int | None = 1, _level: int = 0) -> str:
    """JSON text with every float printed as ``%.17g``; keys keep insertion order."""
    obj = _plain(obj)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = [f"{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return _join(items, "{", "}", indent, _level)
    if isinstance(obj, (list,)):
        return _join([dumps(v, indent, _level + 1) for v in obj], "[", "]", indent, _level)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _join(items, open_, close, indent, level):
    if not items:
        return open_ + close
    if indent is None:
        return open_ + ", ".join(items) + close
    pad = "\n" + " " * (indent * (level + 1))
    return open_ + pad + ("," + pad).join(items) + "\n" + " " * (indent * level) + close


def summarize(records) -> dict:
    """Pass/fail counts and the smallest log margin over records carrying ``pass``."""
    checked = [r for r in records if r.get("pass") is not None]
    passed = sum(1 for r in checked if r["pass"])
    margins = [r["margin_log"] for r in checked
               if r.get("margin_log") is not None and not math.isnan(r["margin_log"])]
    return {"pass_count": passed, "fail_count": len(checked) - passed,
            "min_margin_log": min(margins) if margins else None}


def make_header() -> dict:
    return {"generated": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "version": __version__}


def build_report(command: str, params: dict, seed, records, header=True) -> dict:
    body = {"command": command, "params": dict(params), "seed": seed,
            "records": list(records), "summary": summarize(records)}
    if header:
        return {"header": make_header(), **body}
    return body


def report_body(report: dict) -> dict:
    """The report without its header, i.e. the part that must be reproducible."""
    return {k: v for k, v in report.items() if k != "header"}


def _cell(v):
    v = _plain(v)
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "" if not math.isfinite(v) else "%.17g" % v
    if isinstance(v, (list, dict)):
        return dumps(v, indent=None)
    return str(v)


def records_to_csv(records, columns=None) -> str:
    """CSV text for a list of flat dict records."""
    if columns is None:
        columns = []
        for r in records:
            columns.extend(k for k in r if k not in columns)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in records:
        w.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def grid_to_csv(x, values, meta: dict) -> str:
    """Two-column ``x,value`` CSV with a ``# {json}`` header line."""
    lines = ["# " + dumps(meta, indent=None), "x,value"]
    lines.extend(f"{_cell(float(a))},{_cell(float(b))}" for a, b in zip(x, values))
    return "\n".join(lines) + "\n"


@dataclass
class VerifyReport:
    """Outcome of a verification suite: one record per checked case."""

    suite: str
    params: dict
    seed: int | None
    records: list = field(default_factory=list)

    @property
    def summary(self) -> dict:
        return summarize(self.records)

    @property
    def pass_count(self) -> int:
        return self.summary["pass_count"]

    @property
    def fail_count(self) -> int:
        return self.summary["fail_count"]

    @property
    def ok(self) -> bool:
        return self.fail_count == 0

    def failures(self):
        return [r for r in self.records if r.get("pass") is False]

    def as_report(self, header=True) -> dict:
        return build_report("verify", {"suite": self.suite, **self.params}, self.seed,
                            self.records, header=header)
