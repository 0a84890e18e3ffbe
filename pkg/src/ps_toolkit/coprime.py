"""Coprime pairs and r-tuples of Piatetski-Shapiro values.

Two independent routes compute the same integer:

* brute force, taking gcds over all pairs (or all tuples), and
* Moebius inversion, ``S = sum_d mu(d) prod_i #{n <= x : d | [n^c_i]}``,
  where the divisor counts come from factoring every sequence value and
  enumerating its squarefree divisors.  Summing over all ``d`` (no
  truncation) makes this an identity, so both routes must agree exactly.
"""

from __future__ import annotations

import math
import threading
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _parallel
from .errors import SizeGuardExceeded
from .factor import DEFAULT_BUDGET, FactorBudget, Factorization, factor_many, squarefree_divisors
from .psseq import Real, limit_of, ps_sequence
from .realpow import OrderLike, OrderSpec, as_order

MAX_PAIRS = 25_000_000
MAX_TUPLES = 50_000_000


@dataclass(frozen=True)
class TupleSpec:
    """r orders ``c_1 <= ... <= c_r`` and a counting limit x."""

    x: Real
    orders: tuple[OrderSpec, ...]

    def __post_init__(self):
        if len(self.orders) < 2:
            raise ValueError("need at least two orders")
        if any(b < a for a, b in zip(self.orders, self.orders[1:])):
            raise ValueError("orders must be sorted non-decreasing")
        limit_of(self.x)

    @classmethod
    def build(cls, x: Real, orders: Iterable[OrderLike]) -> "TupleSpec":
        return cls(x=x, orders=tuple(sorted(as_order(c) for c in orders)))

    @property
    def r(self) -> int:
        return len(self.orders)


# ---------------------------------------------------------------------------
# Factorization cache
# ---------------------------------------------------------------------------

_fact_lock = threading.Lock()
_fact_cache: dict[tuple[OrderSpec, FactorBudget], list[Factorization]] = {}


def sequence_factorizations(
    x: Real, c: OrderLike, workers: int = 1, budget: FactorBudget = DEFAULT_BUDGET
) -> list[Factorization]:
    """Factorizations of ``[n^c]`` for ``n = 1..[x]``, cached per order."""
    c = as_order(c)
    n_max = limit_of(x)
    key = (c, budget)
    with _fact_lock:
        cached = _fact_cache.get(key, [])
    if len(cached) >= n_max:
        return cached[:n_max]
    seq = ps_sequence(n_max, c, workers)
    todo = seq[len(cached):]
    if workers > 1:
        parts = _parallel.map_items(_FactorJob(budget), todo, workers)
    else:
        parts = [factor_many(todo, budget)]
    full = cached + [f for part in parts for f in part]
    with _fact_lock:
        if len(_fact_cache.get(key, [])) < len(full):
            _fact_cache[key] = full
    return full[:n_max]


@dataclass(frozen=True)
class _FactorJob:
    budget: FactorBudget

    def __call__(self, values) -> list[Factorization]:
        return factor_many(values, self.budget)


def clear_cache() -> None:
    with _fact_lock:
        _fact_cache.clear()


# ---------------------------------------------------------------------------
# Moebius ledger
# ---------------------------------------------------------------------------


@dataclass
class MobiusLedger:
    """Squarefree divisor counts ``cnt[d] = #{n <= x : d | [n^c]}``.

    One count map per order; ``mu`` holds the Moebius value of every key.
    """

    x: Real
    orders: tuple[OrderSpec, ...]
    cnt: list[dict[int, int]]
    mu: dict[int, int] = field(default_factory=dict)

    def merge(self, other: "MobiusLedger") -> "MobiusLedger":
        """Key-wise sum with a ledger over a disjoint n-range."""
        if other.orders != self.orders:
            raise ValueError("ledgers cover different orders")
        cnt = []
        for mine, theirs in zip(self.cnt, other.cnt):
            merged = Counter(mine)
            merged.update(theirs)
            cnt.append(dict(merged))
        return MobiusLedger(self.x, self.orders, cnt, {**self.mu, **other.mu})

    def mobius_sum(self) -> int:
        """``sum_d mu(d) prod_i cnt_i[d]`` over keys present in every map."""
        smallest = min(self.cnt, key=len)
        total = 0
        for d in smallest:
            prod = self.mu[d]
            for table in self.cnt:
                v = table.get(d)
                if v is None:
                    break
                prod *= v
            else:
                total += prod
        return total


def _divisor_counts(facts: Sequence[Factorization], mu: dict[int, int]) -> dict[int, int]:
    cnt: Counter = Counter()
    for fact in facts:
        divs = squarefree_divisors(p for p, _ in fact)
        cnt.update(d for d, _ in divs)
        for d, m in divs:
            mu[d] = m
    return dict(cnt)


def build_ledger(spec: TupleSpec, workers: int = 1, budget: FactorBudget = DEFAULT_BUDGET) -> MobiusLedger:
    mu: dict[int, int] = {}
    tables: dict[OrderSpec, dict[int, int]] = {}
    for c in spec.orders:
        if c not in tables:
            tables[c] = _divisor_counts(sequence_factorizations(spec.x, c, workers, budget), mu)
    return MobiusLedger(spec.x, spec.orders, [tables[c] for c in spec.orders], mu)


def coprime_tuples_mobius(spec: TupleSpec, workers: int = 1, budget: FactorBudget = DEFAULT_BUDGET) -> int:
    """Number of tuples ``m_1..m_r <= x`` with ``gcd([m_1^c_1], ..., [m_r^c_r]) = 1``."""
    return build_ledger(spec, workers, budget).mobius_sum()


def coprime_pair_counts(
    x_grid: Sequence[Real], c: OrderLike, r: int = 2, workers: int = 1, budget: FactorBudget = DEFAULT_BUDGET
) -> list[int]:
    """Moebius-route counts with all r orders equal to c, at every grid point.

    One pass over n; the running sum is updated by
    ``mu(d) * ((cnt+1)^r - cnt^r)`` for each squarefree ``d | [n^c]``.
    """
    if r < 2:
        raise ValueError("r must be >= 2")
    limits = [limit_of(x) for x in x_grid]
    if any(b < a for a, b in zip(limits, limits[1:])):
        raise ValueError("grid must be sorted")
    if not limits:
        return []
    facts = sequence_factorizations(limits[-1], c, workers, budget)
    cnt: dict[int, int] = {}
    total = 0
    out: list[int] = []
    it = iter(limits)
    target = next(it)
    for n, fact in enumerate(facts, start=1):
        for d, m in squarefree_divisors(p for p, _ in fact):
            k = cnt.get(d, 0)
            cnt[d] = k + 1
            total += m * ((k + 1) ** r - k**r)
        while n == target:
            out.append(total)
            target = next(it, None)
    while len(out) < len(limits):
        out.append(total)
    return out


# ---------------------------------------------------------------------------
# Brute force
# ---------------------------------------------------------------------------


def coprime_pairs_bruteforce(x: Real, c: OrderLike, max_pairs: int = MAX_PAIRS) -> int:
    """Ordered pairs ``m, n <= x`` with ``gcd([m^c], [n^c]) = 1``, by direct gcds."""
    n = limit_of(x)
    if n * n > max_pairs:
        raise SizeGuardExceeded(f"{n}^2 pairs exceeds guard {max_pairs}")
    seq = ps_sequence(n, c)
    if seq.dtype == object:
        vals = seq.tolist()
        return sum(1 for a in vals for b in vals if math.gcd(a, b) == 1)
    total = 0
    rows = max(1, 2_000_000 // n)
    for lo in range(0, n, rows):
        block = np.gcd.outer(seq[lo : lo + rows], seq)
        total += int(np.count_nonzero(block == 1))
    return total


def coprime_tuples_bruteforce(spec: TupleSpec, max_tuples: int = MAX_TUPLES) -> int:
    """Tuple count by gcds over all tuples.

    Partial tuples are grouped by their running gcd, which keeps the work
    proportional to (#distinct partial gcds) * [x] per extra coordinate.
    """
    n = limit_of(spec.x)
    if n**spec.r > max_tuples:
        raise SizeGuardExceeded(f"{n}^{spec.r} tuples exceeds guard {max_tuples}")
    seqs = [ps_sequence(n, c).tolist() for c in spec.orders]
    partial = Counter(seqs[0])
    for vals in seqs[1:]:
        nxt: Counter = Counter()
        for g, mult in partial.items():
            if g == 1:
                nxt[1] += mult * len(vals)
                continue
            for v in vals:
                nxt[math.gcd(g, v)] += mult
        partial = nxt
    return partial.get(1, 0)


def classical_coprime_pairs(x: Real) -> int:
    """Ordered pairs of integers ``m, n <= x`` with ``gcd(m, n) = 1``."""
    n = limit_of(x)
    return sum(1 for a in range(1, n + 1) for b in range(1, n + 1) if math.gcd(a, b) == 1)


# ---------------------------------------------------------------------------
# Main term
# ---------------------------------------------------------------------------


def zeta_bounds(r: int, terms: int) -> tuple[float, float]:
    """Bracket for zeta(r) from ``terms`` series terms and integral tail bounds."""
    if r < 2:
        raise ValueError("zeta needs r >= 2")
    head = math.fsum(float(k) ** -r for k in range(terms, 0, -1))
    lo = head + 1.0 / ((r - 1) * (terms + 1) ** (r - 1))
    hi = head + 1.0 / ((r - 1) * terms ** (r - 1))
    return lo, hi


def zeta(r: int) -> float:
    """Riemann zeta at an integer r >= 2, to at least 13 significant digits."""
    if r < 2:
        raise ValueError("zeta needs r >= 2")
    if r == 2:
        return math.pi**2 / 6
    # tail bracket width is about terms^-r; aim below 1e-14
    terms = math.ceil(10 ** (14 / r)) + 1
    lo, hi = zeta_bounds(r, terms)
    return (lo + hi) / 2


def main_term(x: Real, r: int) -> float:
    """``x^r / zeta(r)``."""
    return float(x) ** r / zeta(r)
