"""Check results and their canonical CSV / JSON encodings.

Canonical JSON has sorted keys, no insignificant whitespace and every float
written as ``%.12e``; non-finite floats become the strings ``"inf"``,
``"-inf"`` and ``"nan"``.  Emitting a parsed report reproduces the same
bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

STATUSES = ("pass", "fail", "inconclusive")
CSV_COLUMNS = ("check", "status", "value", "witness", "seconds")


@dataclass
class CheckResult:
    check: str
    status: str
    value: Any = None
    witness: Any = None
    seconds: Optional[float] = None

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    def to_dict(self) -> dict:
        return {"check": self.check, "status": self.status, "value": self.value,
                "witness": self.witness, "seconds": self.seconds}


@dataclass
class SuiteReport:
    checks: list = field(default_factory=list)

    def add(self, result: CheckResult) -> CheckResult:
        self.checks.append(result)
        return result

    @property
    def failed(self) -> bool:
        return any(c.status == "fail" for c in self.checks)

    @property
    def exit_code(self) -> int:
        return 1 if self.failed else 0

    def to_dict(self) -> dict:
        return {"checks": [c.to_dict() for c in self.checks],
                "status": "fail" if self.failed else "pass"}

    @classmethod
    def from_dict(cls, doc: dict) -> "SuiteReport":
        return cls([CheckResult(**c) for c in doc["checks"]])


def plain(obj):
    """Convert numpy containers and scalars to plain Python values."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return "%.12e" % x


def canonical_json(obj) -> str:
    obj = plain(obj)
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, list):
        return "[" + ",".join(canonical_json(v) for v in obj) + "]"
    if isinstance(obj, dict):
        items = sorted(obj.items())
        return "{" + ",".join(json.dumps(k) + ":" + canonical_json(v) for k, v in items) + "}"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def _cell(v) -> str:
    if v is None:
        return ""
    v = plain(v)
    if isinstance(v, float):
        return _fmt_float(v).strip('"')
    if isinstance(v, str):
        return v
    return canonical_json(v)


def emit(report: SuiteReport, fmt: str = "json") -> bytes:
    if fmt == "json":
        return (canonical_json(report.to_dict()) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for c in report.checks:
            w.writerow([_cell(getattr(c, col)) for col in CSV_COLUMNS])
        return buf.getvalue().encode()
    raise ValueError(f"unknown format {fmt!r}")


def parse_json(data: bytes) -> SuiteReport:
    return SuiteReport.from_dict(json.loads(data))
