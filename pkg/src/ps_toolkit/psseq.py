"""Piatetski-Shapiro sequences ``[n**c]`` and their counts in residue classes.

Everything here streams over ``n <= x`` with certified floors; nothing tries
to invert ``[n**c] = a (mod q)`` analytically.  Sequence prefixes are cached
per order so repeated counts at different ``x``, ``a`` and ``q`` reuse them.
"""

from __future__ import annotations

import math
import threading
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from . import _parallel
from .realpow import OrderLike, OrderSpec, _floor_value, as_order, default_max_bits

Real = Union[int, float, Fraction]

_INT64_SAFE = 2**62

_cache_lock = threading.Lock()
_seq_cache: dict[OrderSpec, np.ndarray] = {}


def limit_of(x: Real) -> int:
    """``[x]`` for a real counting limit ``x >= 1``."""
    if isinstance(x, str):
        x = Fraction(x)
    if x < 1:
        raise ValueError(f"counting limit must be >= 1, got {x}")
    return math.floor(x)


def _floor_chunk(lo: int, hi: int, c: OrderSpec, max_bits: int) -> list[int]:
    return [_floor_value(n, c, max_bits)[0] for n in range(lo, hi)]


def ps_sequence(x: Real, c: OrderLike, workers: int = 1, max_bits: Optional[int] = None) -> np.ndarray:
    """Array of ``[n**c]`` for ``n = 1..[x]`` (index 0 holds n = 1).

    int64 when every value fits, object dtype otherwise.  The returned array
    is read-only and may be shared with the cache.
    """
    c = as_order(c)
    n_max = limit_of(x)
    with _cache_lock:
        cached = _seq_cache.get(c)
    if cached is not None and cached.size >= n_max:
        return cached[:n_max]
    start = 1 if cached is None else cached.size + 1
    max_bits = max_bits or default_max_bits()
    parts = _parallel.map_ranges(_floor_chunk, start, n_max + 1, workers, c, max_bits)
    fresh = [v for part in parts for v in part]
    old = [] if cached is None else cached.tolist()
    values = old + fresh
    dtype = np.int64 if (not values or values[-1] < _INT64_SAFE) else object
    arr = np.array(values, dtype=dtype)
    arr.flags.writeable = False
    with _cache_lock:
        prev = _seq_cache.get(c)
        if prev is None or prev.size < arr.size:
            _seq_cache[c] = arr
    return arr[:n_max]


def clear_cache() -> None:
    with _cache_lock:
        _seq_cache.clear()


def count_ap(x: Real, a: int, q: int, c: OrderLike, workers: int = 1) -> int:
    """``N_c(x; a, q) = #{n <= x : [n^c] = a mod q}``."""
    if q < 1:
        raise ValueError("modulus must be positive")
    seq = ps_sequence(x, c, workers)
    return int(np.count_nonzero(seq % q == a % q))


@dataclass(frozen=True)
class ResidueProfile:
    """Counts ``N_c(x; a, q)`` for every residue ``a mod q``.

    ``counts`` is a dense list of length q when ``q <= [x]`` and a sparse
    ``{a: count}`` dict (nonzero entries only) otherwise.
    """

    x: Real
    q: int
    counts: Union[list[int], dict[int, int]]

    @property
    def sparse(self) -> bool:
        return isinstance(self.counts, dict)

    def __getitem__(self, a: int) -> int:
        a %= self.q
        if self.sparse:
            return self.counts.get(a, 0)
        return self.counts[a]

    def total(self) -> int:
        return sum(self.counts.values()) if self.sparse else sum(self.counts)

    def nonzero(self) -> dict[int, int]:
        if self.sparse:
            return dict(self.counts)
        return {a: v for a, v in enumerate(self.counts) if v}


def residue_profile(x: Real, q: int, c: OrderLike, workers: int = 1) -> ResidueProfile:
    if q < 1:
        raise ValueError("modulus must be positive")
    seq = ps_sequence(x, c, workers)
    residues = seq % q
    if q > seq.size:
        counts = Counter(int(r) for r in residues.tolist())
        return ResidueProfile(x=x, q=q, counts=dict(sorted(counts.items())))
    dense = np.bincount(residues.astype(np.int64), minlength=q)
    return ResidueProfile(x=x, q=q, counts=[int(v) for v in dense])


def divisor_count(x: Real, d: int, c: OrderLike, workers: int = 1) -> int:
    """``#{n <= x : d | [n^c]}``."""
    if d < 1:
        raise ValueError("divisor must be positive")
    return count_ap(x, 0, d, c, workers)


@dataclass(frozen=True)
class ApErrorReport:
    """Observed ``|N_c(x;a,q) - x/q|`` next to the constant-free error term."""

    x: Real
    a: int
    q: int
    k: int
    count: int
    observed: float
    theoretical: float

    @property
    def ratio(self) -> float:
        return self.observed / self.theoretical


def modulus_in_range(x: Real, q: int, c: OrderLike) -> bool:
    """Whether ``1 <= q <= x**c``."""
    if q < 1:
        return False
    c = as_order(c)
    if c.is_rational and isinstance(x, (int, Fraction)):
        xf = Fraction(x)
        # q^s <= x^p
        return Fraction(q) ** c.s <= xf**c.p
    return math.log(q) <= float(c) * math.log(float(x)) * (1 + 1e-12)


def ap_error_term(x: Real, q: int, c: OrderLike, k: int) -> float:
    """``x^(1 - (k-c)/(2^k-1)) * q^(-1/(2^k-1))`` as a float."""
    c = as_order(c)
    if k < 1:
        raise ValueError("k must be >= 1")
    if c.is_rational:
        from .exponent import ap_exponent

        x_exp, q_exp = ap_exponent(k, c.as_fraction())
        x_exp, q_exp = float(x_exp), float(q_exp)
    else:
        w = 2**k - 1
        x_exp, q_exp = 1 - (k - float(c)) / w, -1 / w
    return math.exp(x_exp * math.log(float(x)) + q_exp * math.log(q))


def ap_error_report(x: Real, a: int, q: int, c: OrderLike, k: int, workers: int = 1) -> ApErrorReport:
    c = as_order(c)
    if not modulus_in_range(x, q, c):
        raise ValueError(f"modulus {q} outside [1, x^c] for x={x}, c={c}")
    count = count_ap(x, a, q, c, workers)
    observed = abs(count - float(Fraction(x) / q))
    return ApErrorReport(
        x=x, a=a, q=q, k=k, count=count, observed=observed,
        theoretical=ap_error_term(x, q, c, k),
    )


def dd_coprime_count(x: Real, c: OrderLike, workers: int = 1) -> int:
    """``#{n <= x : gcd(n, [n^c]) = 1}``."""
    seq = ps_sequence(x, c, workers)
    n = np.arange(1, seq.size + 1, dtype=np.int64)
    if seq.dtype == object:
        return sum(1 for i, v in zip(n.tolist(), seq.tolist()) if math.gcd(i, v) == 1)
    return int(np.count_nonzero(np.gcd(n, seq) == 1))


def tau_sum(x: Real, c: OrderLike, workers: int = 1) -> int:
    """``sum_{n <= x} tau([n^c])`` from the cached factorizations."""
    from .coprime import sequence_factorizations
    from .factor import divisor_count as tau

    return sum(tau(f) for f in sequence_factorizations(x, c, workers))
