"""Certified evaluation of ``n**c`` for exact orders ``c >= 1``.

Orders are kept exact (a reduced fraction, the square root of a non-square
integer, or a decimal literal read as the fraction it denotes).  Real values
are enclosed in intervals whose endpoints are MPFR numbers rounded toward
minus/plus infinity, so every floor or fractional part returned here comes
with a proof: either the enclosing interval does not cross an integer, or the
power is an exact integer.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering
from typing import Optional, Union

import gmpy2
from gmpy2 import mpfr

from .errors import PrecisionCapExceeded

START_BITS = 64
MAX_BITS = 16384
MAX_BITS_ENV = "PS_TOOLKIT_MAX_BITS"

# n**p is formed exactly only while it stays this small; beyond it the
# exp(c*log n) route is used instead.
_EXACT_POWER_BITS = 4096

_ZERO = mpfr(0)


def default_max_bits() -> int:
    raw = os.environ.get(MAX_BITS_ENV)
    if raw is None:
        return MAX_BITS
    bits = int(raw)
    if bits < START_BITS:
        raise ValueError(f"{MAX_BITS_ENV} must be >= {START_BITS}, got {bits}")
    return bits


def _ifloor(x: mpfr) -> int:
    """Exact floor; gmpy2.floor and math.floor round through the global context."""
    t = int(x)
    return t - 1 if x < t else t


@lru_cache(maxsize=64)
def _contexts(bits: int):
    down = gmpy2.context(precision=bits, round=gmpy2.RoundDown)
    up = gmpy2.context(precision=bits, round=gmpy2.RoundUp)
    return down, up


# ---------------------------------------------------------------------------
# Orders
# ---------------------------------------------------------------------------

_RATIONAL_RE = re.compile(r"^\s*(\d+)\s*(?:/\s*(\d+))?\s*$")
_DECIMAL_RE = re.compile(r"^\s*(\d+)\.(\d+)\s*$")
_SQRT_RE = re.compile(r"^\s*sqrt\s*[:(]\s*(\d+)\s*\)?\s*$")


@total_ordering
@dataclass(frozen=True)
class OrderSpec:
    """Exact order ``c >= 1`` of a Piatetski-Shapiro sequence.

    Build instances with :meth:`rational`, :meth:`sqrt_int`, :meth:`decimal`
    or :meth:`parse`; the constructors normalise and validate.
    """

    kind: str
    p: int = 1
    s: int = 1
    m: int = 0
    digits: str = ""

    @classmethod
    def rational(cls, p: int, s: int = 1) -> "OrderSpec":
        if p <= 0 or s <= 0:
            raise ValueError("rational order needs positive numerator and denominator")
        g = math.gcd(p, s)
        p, s = p // g, s // g
        if p < s:
            raise ValueError(f"order {p}/{s} is below 1")
        return cls("rational", p=p, s=s)

    @classmethod
    def sqrt_int(cls, m: int) -> "OrderSpec":
        if m < 2:
            raise ValueError("sqrt order needs m >= 2")
        if math.isqrt(m) ** 2 == m:
            raise ValueError(f"sqrt({m}) is an integer; use a rational order")
        return cls("sqrt_int", m=m)

    @classmethod
    def decimal(cls, digits: str) -> "OrderSpec":
        if not _DECIMAL_RE.match(digits) and not _RATIONAL_RE.match(digits):
            raise ValueError(f"not a decimal literal: {digits!r}")
        value = Fraction(digits.strip())
        if value < 1:
            raise ValueError(f"order {digits} is below 1")
        return cls("decimal", p=value.numerator, s=value.denominator, digits=digits.strip())

    @classmethod
    def parse(cls, text: Union[str, int, Fraction, "OrderSpec"]) -> "OrderSpec":
        """Parse ``"3/2"``, ``"2"``, ``"sqrt:2"`` or ``"2.7"``."""
        if isinstance(text, OrderSpec):
            return text
        if isinstance(text, int):
            return cls.rational(text, 1)
        if isinstance(text, Fraction):
            return cls.rational(text.numerator, text.denominator)
        if not isinstance(text, str):
            raise TypeError(f"cannot build an order from {type(text).__name__}")
        if mt := _SQRT_RE.match(text):
            return cls.sqrt_int(int(mt.group(1)))
        if mt := _RATIONAL_RE.match(text):
            return cls.rational(int(mt.group(1)), int(mt.group(2) or 1))
        if _DECIMAL_RE.match(text):
            return cls.decimal(text)
        raise ValueError(f"unrecognised order {text!r}; use p/s, sqrt:m or a decimal")

    # -- exact views --------------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.kind != "sqrt_int"

    @property
    def is_integer(self) -> bool:
        return self.is_rational and self.s == 1

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"order {self} is irrational")
        return Fraction(self.p, self.s)

    def __float__(self) -> float:
        if self.is_rational:
            return self.p / self.s
        return math.sqrt(self.m)

    def ceil(self) -> int:
        if self.is_rational:
            return -(-self.p // self.s)
        return math.isqrt(self.m) + 1

    def interval(self, bits: int) -> "RealInterval":
        down, up = _contexts(bits)
        if self.is_rational:
            return RealInterval.from_fraction(self.as_fraction(), bits)
        return RealInterval(down.sqrt(down.add(_ZERO, self.m)), up.sqrt(up.add(_ZERO, self.m)), bits)

    def _cmp_key(self, other: "OrderSpec") -> int:
        # sign of self - other, decided exactly
        if self.is_rational and other.is_rational:
            a, b = self.as_fraction(), other.as_fraction()
            return (a > b) - (a < b)
        if not self.is_rational and not other.is_rational:
            return (self.m > other.m) - (self.m < other.m)
        if not self.is_rational:
            return -other._cmp_key(self)
        # rational p/s against sqrt(m): compare p^2 with m s^2
        lhs, rhs = self.p * self.p, other.m * self.s * self.s
        return (lhs > rhs) - (lhs < rhs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OrderSpec):
            return NotImplemented
        return self._cmp_key(other) == 0

    def __lt__(self, other: "OrderSpec") -> bool:
        return self._cmp_key(other) < 0

    def __hash__(self) -> int:
        return hash(("sqrt", self.m) if not self.is_rational else ("q", self.p, self.s))

    def __str__(self) -> str:
        if self.kind == "sqrt_int":
            return f"sqrt:{self.m}"
        if self.kind == "decimal":
            return self.digits
        return str(self.p) if self.s == 1 else f"{self.p}/{self.s}"

    def __repr__(self) -> str:
        return f"OrderSpec({str(self)!r})"


OrderLike = Union[OrderSpec, str, int, Fraction]


def as_order(c: OrderLike) -> OrderSpec:
    return OrderSpec.parse(c)


# ---------------------------------------------------------------------------
# Intervals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RealInterval:
    """Closed interval ``[lo, hi]`` with directed-rounded MPFR endpoints."""

    lo: mpfr
    hi: mpfr
    bits: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def from_int(cls, value: int, bits: int) -> "RealInterval":
        down, up = _contexts(bits)
        return cls(down.add(_ZERO, value), up.add(_ZERO, value), bits)

    @classmethod
    def from_fraction(cls, value: Fraction, bits: int) -> "RealInterval":
        down, up = _contexts(bits)
        num = cls.from_int(value.numerator, bits)
        den = cls.from_int(value.denominator, bits)
        # den > 0: divide by the larger bound when the numerator is non-negative
        lo = down.div(num.lo, den.hi if num.lo >= 0 else den.lo)
        hi = up.div(num.hi, den.lo if num.hi >= 0 else den.hi)
        return cls(lo, hi, bits)

    @property
    def width(self) -> mpfr:
        return _contexts(self.bits)[1].sub(self.hi, self.lo)

    def contains(self, value) -> bool:
        return self.lo <= value <= self.hi

    def floor_if_resolved(self) -> Optional[int]:
        """Common floor of both endpoints, or None if the interval crosses an integer."""
        f_lo = _ifloor(self.lo)
        return f_lo if f_lo == _ifloor(self.hi) else None

    def __add__(self, other: "RealInterval") -> "RealInterval":
        bits = min(self.bits, other.bits)
        down, up = _contexts(bits)
        return RealInterval(down.add(self.lo, other.lo), up.add(self.hi, other.hi), bits)

    def __sub__(self, other: "RealInterval") -> "RealInterval":
        bits = min(self.bits, other.bits)
        down, up = _contexts(bits)
        return RealInterval(down.sub(self.lo, other.hi), up.sub(self.hi, other.lo), bits)

    def __mul__(self, other: "RealInterval") -> "RealInterval":
        bits = min(self.bits, other.bits)
        down, up = _contexts(bits)
        pairs = [(a, b) for a in (self.lo, self.hi) for b in (other.lo, other.hi)]
        return RealInterval(
            min(down.mul(a, b) for a, b in pairs),
            max(up.mul(a, b) for a, b in pairs),
            bits,
        )

    def scale(self, num: int, den: int) -> "RealInterval":
        """Multiply by the positive rational ``num/den``."""
        down, up = _contexts(self.bits)
        return RealInterval(
            down.div(down.mul(self.lo, num), den),
            up.div(up.mul(self.hi, num), den),
            self.bits,
        )

    def log(self) -> "RealInterval":
        down, up = _contexts(self.bits)
        return RealInterval(down.log(self.lo), up.log(self.hi), self.bits)

    def exp(self) -> "RealInterval":
        down, up = _contexts(self.bits)
        return RealInterval(down.exp(self.lo), up.exp(self.hi), self.bits)

    def rootn(self, k: int) -> "RealInterval":
        down, up = _contexts(self.bits)
        return RealInterval(down.rootn(self.lo, k), up.rootn(self.hi, k), self.bits)


# ---------------------------------------------------------------------------
# Powers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CertifiedFloor:
    """``value == [n**c]``; ``bits`` is the resolving precision (0 when exact)."""

    n: int
    value: int
    bits: int
    exact: bool


def is_exact_power(n: int, c: OrderLike) -> Optional[int]:
    """Return ``n**c`` if it is an integer, else None."""
    c = as_order(c)
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return 1
    if not c.is_rational:
        return None
    # gcd(p, s) = 1, so n**(p/s) is integral iff n is a perfect s-th power
    root, exact = gmpy2.iroot(n, c.s)
    if not exact:
        return None
    return int(root) ** c.p


@lru_cache(maxsize=256)
def _order_bounds(c: OrderSpec, bits: int) -> tuple[mpfr, mpfr]:
    enc = c.interval(bits)
    return enc.lo, enc.hi


def _power_bounds(n: int, c: OrderSpec, bits: int) -> tuple[mpfr, mpfr]:
    down, up = _contexts(bits)
    if n == 1:
        return down.add(_ZERO, 1), up.add(_ZERO, 1)
    if c.is_rational and c.p * n.bit_length() <= _EXACT_POWER_BITS:
        a = n**c.p
        return down.rootn(down.add(_ZERO, a), c.s), up.rootn(up.add(_ZERO, a), c.s)
    # n >= 2 so log n > 0 and the product of non-negative enclosures is monotone
    c_lo, c_hi = _order_bounds(c, bits)
    lo = down.exp(down.mul(c_lo, down.log(down.add(_ZERO, n))))
    hi = up.exp(up.mul(c_hi, up.log(up.add(_ZERO, n))))
    return lo, hi


def power_interval(n: int, c: OrderSpec, bits: int) -> RealInterval:
    """Enclosure of ``n**c`` at the given working precision."""
    lo, hi = _power_bounds(n, as_order(c), bits)
    return RealInterval(lo, hi, bits)


def _magnitude_bits(n: int, c: OrderSpec) -> int:
    """Rough log2 of n**c, used to pick a starting precision."""
    return int(float(c) * math.log2(n)) + 1 if n > 1 else 1


def _floor_value(n: int, c: OrderSpec, max_bits: int) -> tuple[int, int, bool]:
    exact = is_exact_power(n, c)
    if exact is not None:
        return exact, 0, True
    bits = max(START_BITS, _magnitude_bits(n, c) + 32)
    while bits <= max_bits:
        lo, hi = _power_bounds(n, c, bits)
        f_lo = _ifloor(lo)
        if f_lo == _ifloor(hi):
            return f_lo, bits, False
        bits *= 2
    raise PrecisionCapExceeded(f"[{n}^{c}] unresolved at {max_bits} bits")


def floor_pow(n: int, c: OrderLike, max_bits: Optional[int] = None) -> CertifiedFloor:
    """Certified ``[n**c]``.

    Exact integer powers are detected first; otherwise precision starts at
    64 bits (more for large magnitudes) and doubles until the enclosure of
    ``n**c`` lies strictly between two consecutive integers.
    """
    if n < 1:
        raise ValueError("n must be positive")
    c = as_order(c)
    value, bits, exact = _floor_value(n, c, max_bits or default_max_bits())
    return CertifiedFloor(n=n, value=value, bits=bits, exact=exact)


def verify_floor(cert: CertifiedFloor, c: OrderLike) -> bool:
    """Re-check ``value <= n**c < value + 1`` at twice the certificate precision."""
    c = as_order(c)
    if cert.exact:
        return is_exact_power(cert.n, c) == cert.value
    enc = power_interval(cert.n, c, 2 * cert.bits)
    return enc.lo >= cert.value and enc.hi < cert.value + 1


def frac_interval_scaled(
    n: int,
    h: int,
    q: int,
    c: OrderLike,
    eps: float = 1e-12,
    max_bits: Optional[int] = None,
) -> Union[Fraction, RealInterval]:
    """Enclosure of ``{h * n**c / q}``.

    Returns an exact :class:`Fraction` when ``n**c`` is an integer, otherwise a
    :class:`RealInterval` of width below ``eps`` inside ``[0, 1)``.
    """
    if h < 1 or q < 1:
        raise ValueError("h and q must be positive")
    if eps <= 0:
        raise ValueError("eps must be positive")
    c = as_order(c)
    exact = is_exact_power(n, c)
    if exact is not None:
        return Fraction((h * exact) % q, q)
    max_bits = max_bits or default_max_bits()
    need = _magnitude_bits(n, c) + h.bit_length() + max(0, int(-math.log2(eps))) + 16
    bits = max(START_BITS, need)
    while bits <= max_bits:
        enc = power_interval(n, c, bits).scale(h, q)
        f = enc.floor_if_resolved()
        if f is not None and enc.width < eps:
            down, up = _contexts(bits)
            return RealInterval(down.sub(enc.lo, f), up.sub(enc.hi, f), bits)
        bits *= 2
    raise PrecisionCapExceeded(f"{{{h}*{n}^{c}/{q}}} unresolved at {max_bits} bits")


def frac_part_scaled(
    n: int,
    h: int,
    q: int,
    c: OrderLike,
    eps: float = 1e-12,
    max_bits: Optional[int] = None,
) -> float:
    """``{h * n**c / q}`` to absolute accuracy ``eps``."""
    return frac_parts_scaled((n,), h, q, c, eps, max_bits)[0]


def frac_parts_scaled(
    ns, h: int, q: int, c: OrderLike, eps: float = 1e-12, max_bits: Optional[int] = None
) -> list[float]:
    """:func:`frac_part_scaled` over many ``n``, without per-call overhead."""
    if h < 1 or q < 1:
        raise ValueError("h and q must be positive")
    if eps <= 0:
        raise ValueError("eps must be positive")
    c = as_order(c)
    max_bits = max_bits or default_max_bits()
    extra = h.bit_length() + max(0, int(-math.log2(eps))) + 16
    out = []
    for n in ns:
        n = int(n)
        exact = is_exact_power(n, c)
        if exact is not None:
            out.append(((h * exact) % q) / q)
            continue
        bits = max(START_BITS, _magnitude_bits(n, c) + extra)
        while True:
            if bits > max_bits:
                raise PrecisionCapExceeded(f"{{{h}*{n}^{c}/{q}}} unresolved at {max_bits} bits")
            down, up = _contexts(bits)
            lo, hi = _power_bounds(n, c, bits)
            lo, hi = down.div(down.mul(lo, h), q), up.div(up.mul(hi, h), q)
            f = _ifloor(lo)
            if f == _ifloor(hi) and up.sub(hi, lo) < eps:
                mid = float(down.sub(down.div(down.add(lo, hi), 2), f))
                # float rounding may land on 1.0 for values just below it
                out.append(mid if mid < 1.0 else math.nextafter(1.0, 0.0))
                break
            bits *= 2
    return out
