from fractions import Fraction
import math

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from ps_toolkit.errors import PrecisionCapExceeded
from ps_toolkit.realpow import (
    MAX_BITS_ENV,
    OrderSpec,
    RealInterval,
    default_max_bits,
    floor_pow,
    frac_interval_scaled,
    frac_part_scaled,
    frac_parts_scaled,
    is_exact_power,
    verify_floor,
)


def iroot_floor(n: int, p: int, s: int) -> int:
    """Largest t with t^s <= n^p, by integer bisection."""
    v = n**p
    lo, hi = 0, 1 << (v.bit_length() // s + 1)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid**s <= v:
            lo = mid
        else:
            hi = mid - 1
    return lo


# -- OrderSpec ---------------------------------------------------------------


@pytest.mark.parametrize(
    "text, kind, value",
    [("3/2", "rational", 1.5), ("2", "rational", 2.0), ("sqrt:2", "sqrt_int", math.sqrt(2)), ("2.7", "decimal", 2.7)],
)
def test_parse(text, kind, value):
    c = OrderSpec.parse(text)
    assert c.kind == kind
    assert float(c) == pytest.approx(value, rel=1e-15)


def test_decimal_is_exact_rational():
    c = OrderSpec.parse("2.7")
    assert c.is_rational and c.as_fraction() == Fraction(27, 10)


@pytest.mark.parametrize("bad", ["1/2", "0", "-3", "sqrt:4", "sqrt:0", "abc", "3/0", "sqrt:x"])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        OrderSpec.parse(bad)


def test_exact_ordering_rational_vs_sqrt():
    r2 = OrderSpec.parse("sqrt:2")
    assert OrderSpec.parse("7/5") < r2 < OrderSpec.parse("17/12")
    assert OrderSpec.parse("3/2") == OrderSpec.parse("6/4")
    assert OrderSpec.parse("3/2").ceil() == 2 and OrderSpec.parse("2").ceil() == 2 and r2.ceil() == 2


def test_order_interval_encloses():
    for text in ("3/2", "sqrt:2", "2.7", "sqrt:7"):
        c = OrderSpec.parse(text)
        iv = c.interval(128)
        with mpmath.workprec(300):
            truth = mpmath.sqrt(c.m) if c.kind == "sqrt_int" else mpmath.mpf(c.p) / c.s
            assert mpmath.mpf(str(iv.lo)) <= truth <= mpmath.mpf(str(iv.hi))


# -- RealInterval -------------------------------------------------------------


def test_interval_from_fraction_is_directed():
    iv = RealInterval.from_fraction(Fraction(1, 3), 64)
    assert iv.lo < iv.hi
    assert Fraction(*iv.lo.as_integer_ratio()) < Fraction(1, 3) < Fraction(*iv.hi.as_integer_ratio())


def test_interval_floor_resolution():
    assert RealInterval.from_fraction(Fraction(7, 2), 64).floor_if_resolved() == 3
    assert RealInterval.from_int(5, 64).floor_if_resolved() == 5


# -- floors ------------------------------------------------------------------


@pytest.mark.parametrize("n, c, want", [(4, "3/2", 8), (5, "3/2", 11), (2, "sqrt:2", 2), (1, "sqrt:3", 1)])
def test_floor_examples(n, c, want):
    assert floor_pow(n, c).value == want


def test_exact_power_flagged():
    cert = floor_pow(4, "3/2")
    assert cert.exact and verify_floor(cert, "3/2")
    assert not floor_pow(5, "3/2").exact
    assert is_exact_power(27, "4/3") == 81
    assert is_exact_power(26, "4/3") is None
    assert is_exact_power(10, "sqrt:2") is None


def test_isqrt_oracle_dense():
    c = OrderSpec.parse("3/2")
    for n in range(1, 20001):
        assert floor_pow(n, c).value == math.isqrt(n**3)


@settings(max_examples=300, deadline=None)
@given(n=st.integers(1, 10**5), p=st.integers(2, 9), s=st.integers(1, 5))
def test_rational_root_oracle(n, p, s):
    if p <= s:
        p = s + 1
    assert floor_pow(n, Fraction(p, s)).value == iroot_floor(n, Fraction(p, s).numerator, Fraction(p, s).denominator)


@settings(max_examples=200, deadline=None)
@given(n=st.integers(1, 10**9), c=st.sampled_from(["3/2", "sqrt:2", "2.7", "sqrt:5", "13/7"]))
def test_reverify_at_double_precision(n, c):
    cert = floor_pow(n, c)
    assert verify_floor(cert, c)


@settings(max_examples=100, deadline=None)
@given(n=st.integers(1, 10**12), c=st.sampled_from(["sqrt:2", "sqrt:3", "2.7"]))
def test_mpmath_oracle(n, c):
    spec = OrderSpec.parse(c)
    with mpmath.workprec(400):
        base = mpmath.sqrt(spec.m) if spec.kind == "sqrt_int" else mpmath.mpf(spec.p) / spec.s
        assert floor_pow(n, c).value == int(mpmath.floor(mpmath.power(n, base)))


@pytest.mark.parametrize("c", ["3/2", "sqrt:2", "5/2"])
def test_monotone(c):
    vals = [floor_pow(n, c).value for n in range(1, 3000)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_huge_n_object_values():
    n = 10**30 + 7
    assert floor_pow(n, "3/2").value == math.isqrt(n**3)


def test_precision_cap(monkeypatch):
    monkeypatch.setenv(MAX_BITS_ENV, "64")
    assert default_max_bits() == 64
    with pytest.raises(PrecisionCapExceeded):
        floor_pow(10**30 + 7, "sqrt:2")
    monkeypatch.setenv(MAX_BITS_ENV, "32")
    with pytest.raises(ValueError):
        default_max_bits()


# -- fractional parts --------------------------------------------------------


def test_frac_example():
    assert frac_part_scaled(5, 1, 1, "3/2") == pytest.approx(0.18033988749894847, abs=1e-15)


def test_frac_exact_power_is_fraction():
    assert frac_interval_scaled(4, 3, 5, "3/2") == Fraction(24 % 5, 5)


@settings(max_examples=200, deadline=None)
@given(n=st.integers(2, 10**7), h=st.integers(1, 50), q=st.integers(1, 50), c=st.sampled_from(["3/2", "sqrt:2"]))
def test_frac_interval_never_straddles(n, h, q, c):
    enc = frac_interval_scaled(n, h, q, c, eps=1e-12)
    if isinstance(enc, Fraction):
        assert 0 <= enc < 1
        return
    assert 0 <= enc.lo <= enc.hi < 1
    assert enc.hi - enc.lo < 1e-12


def test_frac_batch_matches_single():
    ns = range(1, 400)
    batch = frac_parts_scaled(ns, 3, 7, "sqrt:2")
    assert batch == [frac_part_scaled(n, 3, 7, "sqrt:2") for n in ns]


def test_frac_against_mpmath():
    with mpmath.workprec(300):
        for n in (2, 3, 1000, 123456):
            truth = mpmath.frac(5 * mpmath.power(n, mpmath.mpf(3) / 2) / 11)
            assert abs(frac_part_scaled(n, 5, 11, "3/2") - float(truth)) < 1e-12
