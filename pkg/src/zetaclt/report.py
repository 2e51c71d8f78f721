"""Result records shared by the metrics, bounds and harness layers."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

VALID_TOL = 1e-10


def fmt(x) -> str:
    """17 significant digits for floats, plain text otherwise."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return f"{x:.17g}"
    return str(x)


@dataclass(frozen=True)
class EstimateInterval:
    """Certified sandwich lower <= value <= upper, with provenance per endpoint."""

    lower: float
    upper: float
    lower_method: str = ""
    upper_method: str = ""
    flags: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "lower", max(float(self.lower), 0.0))
        object.__setattr__(self, "upper", float(self.upper))
        if self.lower > self.upper + 1e-12 * (1.0 + abs(self.upper)):
            raise ValueError(f"inverted interval [{self.lower}, {self.upper}]")

    @property
    def gap(self) -> float:
        if self.upper == 0:
            return 0.0
        return (self.upper - self.lower) / self.upper

    @classmethod
    def exact(cls, value: float, method: str = "exact"):
        return cls(value, value, method, method)


@dataclass(frozen=True)
class BoundReport:
    """One evaluated inequality lhs <= rhs with rhs known up to [rhs_lower, rhs_upper]."""

    bound_name: str
    params: dict
    lhs: float
    rhs_lower: float
    rhs_upper: float
    valid: bool
    tight: bool
    tightness: float
    conservative: bool = False
    note: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def rhs(self) -> float:
        return self.rhs_upper

    @classmethod
    def judge(cls, name, lhs, rhs_lower, rhs_upper=None, params=None, note="", extra=None, tol=VALID_TOL):
        """valid iff lhs <= rhs_upper + tol; tight iff lhs <= rhs_lower + tol."""
        if rhs_upper is None:
            rhs_upper = rhs_lower
        lhs, rhs_lower, rhs_upper = float(lhs), float(rhs_lower), float(rhs_upper)
        valid = lhs <= rhs_upper + tol
        tight = lhs <= rhs_lower + tol
        if lhs == 0.0:
            ratio = 0.0
        elif rhs_lower == 0.0:
            ratio = math.inf
        else:
            ratio = lhs / rhs_lower
        return cls(name, dict(params or {}), lhs, rhs_lower, rhs_upper, valid, tight, ratio,
                   conservative=valid and not tight, note=note, extra=dict(extra or {}))


REPORT_COLUMNS = ["bound_name", "delta", "n", "params", "lhs", "rhs_lower", "rhs_upper", "valid", "tightness"]


def report_row(r: BoundReport) -> list:
    p = dict(r.params)
    delta = p.pop("delta", "")
    n = p.pop("n", "")
    extra = ";".join(f"{k}={fmt(v)}" for k, v in sorted(p.items()))
    return [r.bound_name, fmt(delta), fmt(n), extra, fmt(r.lhs), fmt(r.rhs_lower), fmt(r.rhs_upper),
            fmt(r.valid), fmt(r.tightness)]


def write_csv(rows, header, stream=None) -> str:
    """Write rows (lists of already formatted or raw values) as CSV; returns the text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text


def reports_csv(reports, stream=None) -> str:
    return write_csv([report_row(r) for r in reports], REPORT_COLUMNS, stream)
