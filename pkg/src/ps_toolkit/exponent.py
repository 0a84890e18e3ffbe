"""Exact exponent algebra over the rationals.

Bounds are monomials ``prod v^e`` with rational exponents, kept in log form,
so minimising a max of monotone monomials over one free variable reduces to
comparing affine forms: endpoint limits of each term plus every crossing of
an increasing term with a decreasing one.  Nothing in this module returns a
float.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

from .errors import UnboundedBelow
from .realpow import OrderSpec

K_MAX = 64

RatLike = Union[int, str, Fraction, OrderSpec]


def rat(v: RatLike) -> Fraction:
    if isinstance(v, OrderSpec):
        return v.as_fraction()
    if isinstance(v, float):
        raise TypeError("exponent algebra takes exact rationals, not floats")
    return Fraction(v)


# ---------------------------------------------------------------------------
# Monomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LogMonomial:
    """``prod_v v^{e_v}`` stored as sorted ``(name, exponent)`` pairs, zeros dropped."""

    exps: tuple[tuple[str, Fraction], ...] = ()

    @classmethod
    def of(cls, mapping: Optional[Mapping[str, RatLike]] = None, **kw: RatLike) -> "LogMonomial":
        items = dict(mapping or {})
        items.update(kw)
        clean = {k: rat(v) for k, v in items.items()}
        return cls(tuple(sorted((k, v) for k, v in clean.items() if v != 0)))

    def __getitem__(self, var: str) -> Fraction:
        return dict(self.exps).get(var, Fraction(0))

    @property
    def variables(self) -> frozenset[str]:
        return frozenset(k for k, _ in self.exps)

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.exps)

    def __mul__(self, other: "LogMonomial") -> "LogMonomial":
        out = self.as_dict()
        for k, v in other.exps:
            out[k] = out.get(k, Fraction(0)) + v
        return LogMonomial.of(out)

    def __truediv__(self, other: "LogMonomial") -> "LogMonomial":
        return self * other ** -1

    def __pow__(self, e: RatLike) -> "LogMonomial":
        e = rat(e)
        return LogMonomial.of({k: v * e for k, v in self.exps})

    def without(self, var: str) -> "LogMonomial":
        return LogMonomial.of({k: v for k, v in self.exps if k != var})

    def log_value(self, at: Mapping[str, RatLike]) -> Fraction:
        """``sum_v e_v * at[v]``, i.e. the log of the monomial at the given log-point."""
        return sum((v * rat(at[k]) for k, v in self.exps), Fraction(0))

    def __str__(self) -> str:
        if not self.exps:
            return "1"
        parts = []
        for k, v in self.exps:
            parts.append(k if v == 1 else f"{k}^({v})")
        return " ".join(parts)


ONE = LogMonomial()


# ---------------------------------------------------------------------------
# Min-max optimisation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OptProblem:
    """Minimise ``max(terms)`` over the free variable ``var``.

    ``lower``/``upper`` bound ``var`` as monomials in the other variables
    (``None`` for 0 and infinity respectively, i.e. an infinite endpoint in
    log scale).  ``at`` optionally fixes log-values of the other variables;
    it is needed whenever candidates must be compared and their difference is
    not a constant.
    """

    increasing: tuple[LogMonomial, ...]
    decreasing: tuple[LogMonomial, ...]
    var: str = "H"
    lower: Optional[LogMonomial] = None
    upper: Optional[LogMonomial] = None
    at: Optional[Mapping[str, Fraction]] = field(default=None, hash=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "increasing", tuple(self.increasing))
        object.__setattr__(self, "decreasing", tuple(self.decreasing))
        if not self.increasing and not self.decreasing:
            raise ValueError("problem has no terms")
        for t in self.increasing:
            if t[self.var] <= 0:
                raise ValueError(f"{t} is not increasing in {self.var}")
        for t in self.decreasing:
            if t[self.var] > 0:
                raise ValueError(f"{t} is not non-increasing in {self.var}")
        for end in (self.lower, self.upper):
            if end is not None and self.var in end.variables:
                raise ValueError("interval endpoints may not involve the free variable")
        if self.lower is not None and self.upper is not None:
            if self._sign(self.upper / self.lower) <= 0:
                raise ValueError("empty interval")

    def _sign(self, form: LogMonomial) -> int:
        if not form.exps:
            return 0
        if self.at is None:
            raise ValueError(f"cannot decide the sign of log({form}) without a reference point")
        v = form.log_value(self.at)
        return (v > 0) - (v < 0)

    def evaluate(self, t: Fraction) -> Fraction:
        """``log Phi`` at ``log var = t`` (requires ``at``)."""
        at = dict(self.at or {})
        at[self.var] = t
        return max(m.log_value(at) for m in self.increasing + self.decreasing)


@dataclass(frozen=True)
class OptResult:
    """Infimum of the max as a monomial, and where it is approached.

    ``argmin`` is the monomial value of the free variable, or None when the
    infimum is a limit at an infinite endpoint; ``source`` is one of
    ``"left"``, ``"right"``, ``"crossing"``.
    """

    value: LogMonomial
    argmin: Optional[LogMonomial]
    source: str


def _at_endpoint(term: LogMonomial, var: str, end: LogMonomial) -> LogMonomial:
    return term.without(var) * end ** term[var]


def optimize(problem: OptProblem) -> OptResult:
    """``inf max(...)`` = max of left limits, right limits and crossing values."""
    var = problem.var
    cands: list[OptResult] = []
    for f in problem.increasing:
        if problem.lower is not None:
            cands.append(OptResult(_at_endpoint(f, var, problem.lower), problem.lower, "left"))
        # with an infinite left end the limit is 0, i.e. log = -inf
    for g in problem.decreasing:
        if problem.upper is not None:
            cands.append(OptResult(_at_endpoint(g, var, problem.upper), problem.upper, "right"))
        elif g[var] == 0:
            cands.append(OptResult(g, None, "right"))
    for f in problem.increasing:
        for g in problem.decreasing:
            # f_aux * H^a = g_aux * H^b  =>  H = (g_aux / f_aux)^(1/(a-b))
            a, b = f[var], g[var]
            point = (g.without(var) / f.without(var)) ** (1 / (a - b))
            if problem.lower is not None and problem._sign(point / problem.lower) < 0:
                continue
            if problem.upper is not None and problem._sign(problem.upper / point) < 0:
                continue
            cands.append(OptResult(_at_endpoint(f, var, point), point, "crossing"))
    if not cands:
        raise UnboundedBelow("every term tends to 0 at an endpoint; the infimum is 0")
    best = cands[0]
    for cand in cands[1:]:
        if problem._sign(cand.value / best.value) > 0:
            best = cand
    return best


def grid_search(problem: OptProblem, lo: Fraction, hi: Fraction, points: int = 100_000) -> float:
    """Brute-force ``min log Phi`` over an even grid of ``log var`` in ``[lo, hi]``."""
    if problem.at is None:
        raise ValueError("grid search needs a reference point")
    terms = problem.increasing + problem.decreasing
    base = [float(t.without(problem.var).log_value(problem.at)) for t in terms]
    slope = [float(t[problem.var]) for t in terms]
    lo_f, hi_f = float(lo), float(hi)
    step = (hi_f - lo_f) / (points - 1)
    best = float("inf")
    for i in range(points):
        t = lo_f + i * step
        best = min(best, max(b + s * t for b, s in zip(base, slope)))
    return best


def ap_block_problem(k: int, c: RatLike, full: bool = False) -> OptProblem:
    """The choice of H for one dyadic block of the AP count.

    Two-term form: balance ``M H^-1`` against
    ``(H q^-1)^(1/(2^k-2)) M^(1 + (c-k)/(2^k-2))`` with H free.  ``full`` adds
    the ``M^(1-c) q H^-1`` and ``M^(1-c)`` terms (log factors dropped) and the
    constraint ``H <= qM``.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    c = rat(c)
    w = Fraction(2**k - 2)
    dec = [LogMonomial.of(M=1, H=-1)]
    inc = [LogMonomial.of(H=1 / w, q=-1 / w, M=1 + (c - k) / w)]
    upper = None
    if full:
        dec += [LogMonomial.of(M=1 - c, q=1, H=-1), LogMonomial.of(M=1 - c)]
        upper = LogMonomial.of(q=1, M=1)
    return OptProblem(tuple(inc), tuple(dec), var="H", upper=upper)


# ---------------------------------------------------------------------------
# Closed-form exponents
# ---------------------------------------------------------------------------


def ap_exponent(k: int, c: RatLike) -> tuple[Fraction, Fraction]:
    """Exponents of x and q in ``x^(1-(k-c)/(2^k-1)) q^(-1/(2^k-1))``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    c = rat(c)
    w = 2**k - 1
    return 1 - (k - c) / w, Fraction(-1, w)


def ap_bound_exponent(k: int, c: RatLike, theta: RatLike) -> Fraction:
    """Exponent of x in the AP error term when ``q = x^theta``."""
    x_exp, q_exp = ap_exponent(k, c)
    return x_exp + q_exp * rat(theta)


def crossing_exponent(k: int, c: RatLike) -> Fraction:
    """theta with ``x^theta = x_k``: below it k+1 beats k, above it k wins."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return rat(c) + 1 - k - Fraction(1, 2**k)


def best_k_for_modulus(c: RatLike, theta: RatLike) -> int:
    """The k >= 1 with ``x_k < q <= x_{k-1}`` for ``q = x^theta``."""
    c, theta = rat(c), rat(theta)
    if not (0 <= theta <= c):
        raise ValueError("need 0 <= theta <= c")
    for k in range(1, K_MAX + 1):
        if crossing_exponent(k, c) < theta <= crossing_exponent(k - 1, c):
            return k
    raise ValueError(f"no k <= {K_MAX} for c={c}, theta={theta}")


def pair_error_exponent(k: int, c: RatLike, r: int = 2) -> Fraction:
    """``r - (k-c)/(2^k-1)``, the error exponent of the r-tuple count."""
    c = rat(c)
    if k < 2 or r < 2:
        raise ValueError("need k >= 2 and r >= 2")
    if c >= k:
        raise ValueError(f"need c < k, got c={c}, k={k}")
    return r - (k - c) / (2**k - 1)


def choose_k_special(c: RatLike) -> int:
    """The k >= 2 with ``k - 2 + 2^-(k-1) < c <= k - 1 + 2^-k``."""
    c = rat(c)
    if c < 1:
        raise ValueError("need c >= 1")
    for k in range(2, K_MAX + 1):
        if k - 2 + Fraction(1, 2 ** (k - 1)) < c <= k - 1 + Fraction(1, 2**k):
            return k
    raise ValueError(f"no k <= {K_MAX} for c={c}")


def special_exponent(c: RatLike, r: int = 2) -> Fraction:
    """``r - 2^-(ceil(c)+1)``, the k-free error exponent."""
    c = rat(c)
    ceil_c = -(-c.numerator // c.denominator)
    return r - Fraction(1, 2 ** (ceil_c + 1))


def split_exponent(k: int, c_r: RatLike) -> Fraction:
    """Exponent of the divisor split point ``D = x^((k-c_r)/(2^k-2))``.

    Only a proof device; the Moebius sums here are evaluated in full.
    """
    return (k - rat(c_r)) / (2**k - 2)


def slack_epsilon(k: int, c_r: RatLike) -> Fraction:
    """The divisor-bound slack ``(k-c_r)/((2^k-2)(2^k-1))``; informational."""
    return (k - rat(c_r)) / ((2**k - 2) * (2**k - 1))


def compare_exponents(a: Fraction, b: Fraction) -> int:
    return (a > b) - (a < b)


def exponent_table(c: RatLike, ks: Iterable[int]) -> list[dict]:
    """AP exponents and tie thresholds for several k, as plain records."""
    rows = []
    for k in ks:
        x_exp, q_exp = ap_exponent(k, c)
        rows.append({"k": k, "x_exp": x_exp, "q_exp": q_exp, "threshold": crossing_exponent(k, c)})
    return rows
