"""Exponential sums ``sum e(h n^c / q)`` and the two constant-free bounds used on them.

``vdc_bound`` is the k-th derivative estimate
``F^(1/(2^k-2)) N^(1-k/(2^k-2)) + N/F`` and ``et_sides`` evaluates both sides
of the Erdos-Turan discrepancy inequality.  Neither carries an implicit
constant; those are fitted empirically by the callers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .psseq import Real
from .realpow import OrderLike, OrderSpec, as_order, frac_parts_scaled

DEFAULT_EPS = 1e-12
MAX_TERMS = 10**8

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class DyadicBlock:
    """Summation range ``M < n <= M2`` with ``1 <= M <= M2 <= 2M``."""

    M: Real
    M2: Real

    def __post_init__(self):
        if not (1 <= self.M <= self.M2 <= 2 * self.M):
            raise ValueError(f"need 1 <= M <= M2 <= 2M, got M={self.M}, M2={self.M2}")

    def integers(self) -> range:
        return range(math.floor(self.M) + 1, math.floor(self.M2) + 1)

    def __len__(self) -> int:
        return len(self.integers())


def dyadic_blocks(x: Real) -> list[DyadicBlock]:
    """Blocks ``(M_k, M_{k+1}]`` with ``M_k = min(2^k, x)`` covering ``1 < n <= x``."""
    if x < 1:
        raise ValueError("x must be >= 1")
    K = math.floor(math.log2(x))
    while 2 ** (K + 1) <= x:
        K += 1
    while 2**K > x:
        K -= 1
    edges = [min(2**k, x) for k in range(K + 2)]
    return [DyadicBlock(a, b) for a, b in zip(edges, edges[1:]) if a < b]


@dataclass(frozen=True)
class PhaseParams:
    """Phase ``f(t) = h t^c / q``."""

    h: int
    q: int
    c: OrderSpec

    def __post_init__(self):
        if self.h < 1 or self.q < 1:
            raise ValueError("h and q must be positive")
        object.__setattr__(self, "c", as_order(self.c))


def phase_fractions(block: DyadicBlock, p: PhaseParams, eps: float = DEFAULT_EPS) -> np.ndarray:
    """``{h n^c / q}`` for every n in the block, each accurate to eps."""
    ns = block.integers()
    if len(ns) > MAX_TERMS:
        raise ValueError(f"block has {len(ns)} terms, limit is {MAX_TERMS}")
    return np.asarray(frac_parts_scaled(ns, p.h, p.q, p.c, eps), dtype=float)


def exp_sum(fracs: Union[Sequence[float], np.ndarray], negate: bool = False) -> complex:
    """``sum e(t)`` over the given phases, with exactly rounded real and imaginary sums."""
    ang = TWO_PI * np.asarray(fracs, dtype=float)
    re = math.fsum(np.cos(ang).tolist())
    im = math.fsum(np.sin(ang).tolist())
    return complex(re, -im if negate else im)


def weyl_sum(block: DyadicBlock, p: PhaseParams, eps: float = DEFAULT_EPS, negate: bool = False) -> complex:
    """``sum_{M < n <= M2} e(+-h n^c / q)``.

    Every phase is certified to ``eps``, so the result is within
    ``2*pi*eps*(#terms)`` of the true sum (plus float rounding of cos/sin).
    """
    return exp_sum(phase_fractions(block, p, eps), negate)


def weyl_error_bound(block: DyadicBlock, eps: float = DEFAULT_EPS) -> float:
    return TWO_PI * eps * len(block)


def vdc_bound(F: float, N: float, k: int) -> float:
    """``F^(1/(2^k-2)) * N^(1-k/(2^k-2)) + N/F`` (k-th derivative estimate, no constant)."""
    if k < 2:
        raise ValueError("k must be >= 2")
    if F <= 0 or N < 1:
        raise ValueError("need F > 0 and N >= 1")
    w = 2**k - 2
    return F ** (1 / w) * N ** (1 - k / w) + N / F


def phase_scale(p: PhaseParams, M: Real) -> float:
    """``F = h M^c / q``."""
    return p.h * float(M) ** float(p.c) / p.q


def falling_product(c: OrderLike, r: int) -> Union[Fraction, float]:
    """``(c)_r = c (c-1) ... (c-r+1)``; exact for rational orders."""
    if r < 1:
        raise ValueError("r must be >= 1")
    c = as_order(c)
    if c.is_rational:
        v = c.as_fraction()
        out = Fraction(1)
    else:
        v = float(c)
        out = 1.0
    for i in range(r):
        out *= v - i
    return out


def derivative_constant(c: OrderLike, r: int) -> float:
    """Smallest A with ``A^-1 F M^-r <= |f^(r)(t)| <= A F M^-r`` on ``(M, 2M]``.

    ``|f^(r)(t)| = |(c)_r| F M^-r (t/M)^(c-r)`` and ``t/M`` ranges over ``(1, 2]``.
    """
    c = as_order(c)
    fp = abs(float(falling_product(c, r)))
    if fp == 0.0:
        return math.inf
    edge = 2.0 ** (float(c) - r)
    lo, hi = fp * min(1.0, edge), fp * max(1.0, edge)
    return max(hi, 1.0 / lo, 1.0)


@dataclass(frozen=True)
class EtBoundInput:
    """A real sequence, a target interval ``[alpha, beta)`` and the cut-off H.

    ``beta = 1`` is accepted and means the whole unit interval.
    """

    values: tuple[float, ...]
    alpha: float
    beta: float
    H: float

    def __post_init__(self):
        if not (0 <= self.alpha <= self.beta <= 1):
            raise ValueError("need 0 <= alpha <= beta <= 1")
        if self.H <= 0:
            raise ValueError("H must be positive")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))


def et_sides(inp: EtBoundInput) -> tuple[float, float]:
    """``(lhs, rhs)`` of the Erdos-Turan inequality, implicit constant excluded.

    lhs = |#{n : {x_n} in [alpha, beta)} - (beta - alpha) N|
    rhs = N/H + sum_{1 <= h <= H} (1/H + min(beta - alpha, 1/h)) |sum_n e(h x_n)|
    """
    x = np.asarray(inp.values, dtype=float)
    N = x.size
    fr = x - np.floor(x)
    width = inp.beta - inp.alpha
    inside = int(np.count_nonzero((fr >= inp.alpha) & (fr < inp.beta)))
    lhs = abs(inside - width * N)
    terms = [N / inp.H]
    for h in range(1, math.floor(inp.H) + 1):
        # reduce h*x mod 1 before scaling by 2*pi to keep the phases small
        hx = h * fr
        s = abs(exp_sum(hx - np.floor(hx)))
        terms.append((1 / inp.H + min(width, 1 / h)) * s)
    return lhs, math.fsum(terms)


def ps_fractions(ns, q: int, c: OrderLike, eps: float = DEFAULT_EPS) -> np.ndarray:
    """``{n^c / q}`` for the given n, e.g. as Erdos-Turan input."""
    return np.asarray(frac_parts_scaled(ns, 1, q, c, eps), dtype=float)
