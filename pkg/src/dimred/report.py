"""Check reports and their JSON / CSV serialization.

Floats are written with 17 significant digits so a report read back equals
the one written, and a fixed run configuration yields byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

CSV_HEADER = ["check", "input", "value", "reference", "error", "stderr", "tol", "pass"]
PROVENANCE_KINDS = ("PAPER", "TRIVIAL", "DERIVED")


@dataclass(frozen=True)
class CheckReport:
    """One comparison of a computed value against a reference.

    ``passed`` is derived: error <= tol, where MC checks set tol to 3 stderr.
    """

    check: str
    inputs: Dict[str, Any]
    value: Any
    reference: Any
    provenance: str
    error: float
    tol: float
    stderr: Optional[float] = None
    rel_error: Optional[float] = None
    wall_time: Optional[float] = None
    passed: bool = field(init=False)

    def __post_init__(self):
        kind = self.provenance.split(":", 1)[0]
        if kind not in PROVENANCE_KINDS or (kind == "DERIVED" and ":" not in self.provenance):
            raise ValueError(f"bad provenance tag {self.provenance!r}")
        if not self.tol >= 0:
            raise ValueError("tolerance must be non-negative")
        ok = self.error is not None and math.isfinite(self.error) and self.error <= self.tol
        object.__setattr__(self, "passed", bool(ok))


def compare(check: str, inputs: Dict[str, Any], value, reference, provenance: str, tol: float,
            stderr: Optional[float] = None) -> CheckReport:
    """Report |value - reference|; with a stderr the tolerance becomes 3 stderr."""
    err = abs(value - reference)
    rel = err / abs(reference) if reference else None
    if stderr is not None:
        tol = 3.0 * stderr
    return CheckReport(check, dict(inputs), value, reference, provenance, err, tol, stderr, rel)


def _num(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if not math.isfinite(x):
        return json.dumps(repr(x))
    s = format(x, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def _dump(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, (bool, int, float)):
        return _num(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_dump(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_dump(v) for v in obj) + "]"
    if hasattr(obj, "item"):
        return _dump(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _as_record(r: CheckReport) -> Dict[str, Any]:
    return {"check": r.check, "inputs": r.inputs, "value": r.value, "reference": r.reference,
            "provenance": r.provenance, "error": r.error, "rel_error": r.rel_error,
            "stderr": r.stderr, "tol": r.tol, "pass": r.passed, "wall_time": r.wall_time}


def to_json(reports: Sequence[CheckReport]) -> str:
    if not reports:
        return "[]\n"
    return "[\n" + ",\n".join("  " + _dump(_as_record(r)) for r in reports) + "\n]\n"


def _input_text(inputs: Dict[str, Any]) -> str:
    return ";".join(f"{k}={_dump(v)}" for k, v in inputs.items())


def _cell(x) -> str:
    if x is None:
        return ""
    return x if isinstance(x, str) else _dump(x)


def to_csv(reports: Sequence[CheckReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")  # RFC 4180; also forces quoting of bare CR
    w.writerow(CSV_HEADER)
    for r in reports:
        w.writerow([r.check, _input_text(r.inputs), _cell(r.value), _cell(r.reference),
                    _cell(r.error), _cell(r.stderr), _cell(r.tol), _cell(r.passed)])
    return buf.getvalue()


def write_report(reports: Sequence[CheckReport], path, fmt: str = "json") -> None:
    """Write reports to ``path``; OSError propagates to the caller."""
    if fmt == "json":
        text = to_json(reports)
    elif fmt == "csv":
        text = to_csv(reports)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _restore(x):
    if isinstance(x, str) and x in ("inf", "-inf", "nan"):
        return float(x)
    return x


def from_json(text: str) -> List[CheckReport]:
    out = []
    for rec in json.loads(text):
        r = CheckReport(rec["check"], rec["inputs"], _restore(rec["value"]),
                        _restore(rec["reference"]), rec["provenance"], _restore(rec["error"]),
                        _restore(rec["tol"]), rec["stderr"], rec["rel_error"], rec["wall_time"])
        if r.passed != rec["pass"]:
            raise ValueError(f"pass flag of {r.check} disagrees with error and tol")
        out.append(r)
    return out


def read_report(path) -> List[CheckReport]:
    with open(path, encoding="utf-8") as fh:
        return from_json(fh.read())
