"""Error curves for the counting theorems and their log-log fits."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from . import coprime, psseq
from .realpow import OrderLike, as_order

Number = Union[int, float, Fraction]


@dataclass(frozen=True)
class ErrorCurve:
    """``(x, |observed - main term|)`` samples, x strictly increasing."""

    samples: tuple[tuple[float, float], ...]
    meta: dict = field(default_factory=dict, hash=False, compare=False)

    def __post_init__(self):
        xs = [x for x, _ in self.samples]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("x values must be strictly increasing")
        if any(e < 0 for _, e in self.samples):
            raise ValueError("errors must be non-negative")

    @property
    def xs(self) -> list[float]:
        return [x for x, _ in self.samples]

    @property
    def errors(self) -> list[float]:
        return [e for _, e in self.samples]


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    residual: float
    n_points: int
    dropped_zeros: int = 0


def geometric_grid(start: int, stop: int, ratio: int = 2) -> list[int]:
    """``start, start*ratio, ...`` up to and including ``stop``."""
    if start < 1 or ratio < 2:
        raise ValueError("need start >= 1 and ratio >= 2")
    out = []
    x = start
    while x <= stop:
        out.append(x)
        x *= ratio
    return out


def error_curve_pairs(x_grid: Sequence[Number], c: OrderLike, r: int = 2, workers: int = 1) -> ErrorCurve:
    """``|S(x) - x^r/zeta(r)|`` on the grid, S counted exactly by Moebius inversion."""
    c = as_order(c)
    counts = coprime.coprime_pair_counts(x_grid, c, r=r, workers=workers)
    samples = tuple(
        (float(x), abs(s - coprime.main_term(x, r))) for x, s in zip(x_grid, counts)
    )
    return ErrorCurve(samples, {"sum": "pairs" if r == 2 else "tuples", "orders": [str(c)] * r, "counts": counts})


def error_curve_ap(x_grid: Sequence[Number], a: int, q: int, c: OrderLike, workers: int = 1) -> ErrorCurve:
    """``|N_c(x; a, q) - x/q|`` on the grid."""
    c = as_order(c)
    counts = [psseq.count_ap(x, a, q, c, workers) for x in x_grid]
    samples = tuple((float(x), abs(n - float(Fraction(x) / q))) for x, n in zip(x_grid, counts))
    return ErrorCurve(samples, {"sum": "ap", "orders": [str(c)], "a": a, "q": q, "counts": counts})


def error_curve_dd(x_grid: Sequence[Number], c: OrderLike, workers: int = 1) -> ErrorCurve:
    """``|#{n <= x : (n, [n^c]) = 1} - x/zeta(2)|`` on the grid."""
    c = as_order(c)
    counts = [psseq.dd_coprime_count(x, c, workers) for x in x_grid]
    z2 = coprime.zeta(2)
    samples = tuple((float(x), abs(n - float(x) / z2)) for x, n in zip(x_grid, counts))
    return ErrorCurve(samples, {"sum": "dd", "orders": [str(c)], "counts": counts})


def fit_slope(curve: ErrorCurve) -> SlopeFit:
    """Least squares of log(error) on log(x); zero errors are dropped and counted."""
    pts = [(x, e) for x, e in curve.samples if e > 0]
    dropped = len(curve.samples) - len(pts)
    if len(pts) < 3:
        raise ValueError(f"need >= 3 nonzero samples, have {len(pts)}")
    lx = np.log([x for x, _ in pts])
    le = np.log([e for _, e in pts])
    A = np.vstack([lx, np.ones_like(lx)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, le, rcond=None)
    resid = le - (slope * lx + intercept)
    return SlopeFit(
        slope=float(slope),
        intercept=float(intercept),
        residual=float(np.sqrt(np.mean(resid**2))),
        n_points=len(pts),
        dropped_zeros=dropped,
    )


def constant_fit(curve: ErrorCurve, exponent: Number) -> float:
    """Smallest C with ``error <= C * x^exponent`` at every sample."""
    e = float(exponent)
    return max((err / x**e for x, err in curve.samples), default=0.0)


def report_rows(curve: ErrorCurve, exponent: Optional[Number] = None) -> list[dict]:
    """One record per sample: x, observed, theoretical ``x^exponent``, ratio."""
    rows = []
    for x, err in curve.samples:
        theo = x ** float(exponent) if exponent is not None else None
        rows.append({
            "x": x,
            "observed": err,
            "theoretical": theo,
            "ratio": err / theo if theo else None,
        })
    return rows


CSV_COLUMNS = ("x", "observed", "theoretical", "ratio")


def rows_to_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: "" if row[k] is None else repr(row[k]) for k in CSV_COLUMNS})
    return buf.getvalue()


def rows_to_json(rows: Iterable[dict]) -> str:
    return json.dumps(list(rows), sort_keys=True)
