"""Integer factorization for sequence values.

Trial division by sieved primes, then a deterministic Miller-Rabin test and
Brent's variant of Pollard rho with a fixed seed schedule, so every run
produces the same factorizations.  :func:`factor_many` does the trial phase
column-wise with numpy, which is what makes factoring whole sequences cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import FactorizationFailed

Factorization = tuple[tuple[int, int], ...]

# Deterministic for n < 3.3e24 (Sorenson & Webster); larger n falls back to
# these bases as a strong probable-prime test.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


@dataclass(frozen=True)
class FactorBudget:
    trial_limit: int = 10**6
    rho_iterations: int = 1 << 22
    rho_seeds: int = 16


DEFAULT_BUDGET = FactorBudget()


@lru_cache(maxsize=8)
def primes_upto(limit: int) -> np.ndarray:
    """All primes <= limit, as an int64 array."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if sieve[p]:
            sieve[p * p :: 2 * p] = False
    return np.flatnonzero(sieve).astype(np.int64)


def is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent(n: int, seed: int, max_iter: int) -> int:
    """One Pollard-Brent run with f(x) = x^2 + seed; returns a divisor or n."""
    y, c, m = 2 + seed, seed, 128
    g = r = q = 1
    x = ys = y
    steps = 0
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += m
        r *= 2
        steps += r
        if steps > max_iter:
            return n
    if g == n:
        # backtrack one step at a time
        while True:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
            if g > 1:
                break
    return g


def _split(n: int, budget: FactorBudget) -> int:
    for seed in range(1, budget.rho_seeds + 1):
        d = _brent(n, seed, budget.rho_iterations)
        if 1 < d < n:
            return d
    raise FactorizationFailed(f"rho found no factor of {n} within budget")


def _factor_cofactor(n: int, out: dict[int, int], budget: FactorBudget) -> None:
    """Factor n (no prime factors below the trial bound) into out."""
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_probable_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack.extend((r, r))
            continue
        d = _split(m, budget)
        stack.extend((d, m // d))


def factorize(n: int, budget: FactorBudget = DEFAULT_BUDGET) -> Factorization:
    """Prime factorization of n >= 1 as sorted ((p, e), ...)."""
    if n < 1:
        raise ValueError("can only factor positive integers")
    out: dict[int, int] = {}
    bound = min(budget.trial_limit, math.isqrt(n))
    for p in primes_upto(max(bound, 2)).tolist():
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
    if n > 1:
        if n <= budget.trial_limit**2:
            out[n] = out.get(n, 0) + 1
        else:
            _factor_cofactor(n, out, budget)
    return tuple(sorted(out.items()))


def factor_many(values: Sequence[int] | np.ndarray, budget: FactorBudget = DEFAULT_BUDGET) -> list[Factorization]:
    """Factor every value; trial division is vectorised across the batch."""
    vals = np.asarray(values)
    if vals.size == 0:
        return []
    if vals.dtype == object or int(vals.max()) >= 2**62:
        return [factorize(int(v), budget) for v in vals]
    if int(vals.min()) < 1:
        raise ValueError("can only factor positive integers")
    rem = vals.astype(np.int64).copy()
    found: list[dict[int, int]] = [dict() for _ in range(rem.size)]
    bound = min(budget.trial_limit, math.isqrt(int(rem.max())))
    active = np.arange(rem.size)
    for p in primes_upto(max(bound, 2)).tolist():
        # values with rem < p^2 are already fully split
        active = active[rem[active] >= p * p]
        if active.size == 0:
            break
        hit = active[rem[active] % p == 0]
        while hit.size:
            rem[hit] //= p
            for i in hit.tolist():
                found[i][p] = found[i].get(p, 0) + 1
            hit = hit[rem[hit] % p == 0]
    limit_sq = budget.trial_limit**2
    for i, r in enumerate(rem.tolist()):
        if r > 1:
            if r <= limit_sq:
                found[i][r] = found[i].get(r, 0) + 1
            else:
                _factor_cofactor(r, found[i], budget)
    return [tuple(sorted(f.items())) for f in found]


def squarefree_divisors(primes: Iterable[int]) -> list[tuple[int, int]]:
    """All (d, mu(d)) for squarefree d built from the given distinct primes."""
    out = [(1, 1)]
    for p in primes:
        out += [(d * p, -mu) for d, mu in out]
    return out


def divisor_count(fact: Factorization) -> int:
    t = 1
    for _, e in fact:
        t *= e + 1
    return t
