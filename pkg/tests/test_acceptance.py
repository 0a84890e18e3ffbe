"""Acceptance criteria 1-11, one pass/fail line each.

Run alone with ``python3 tests/test_acceptance.py`` or via pytest; the
``-rP`` option set in pyproject.toml shows the printed lines.
"""

from fractions import Fraction
import math
import random
import time

import numpy as np
import pytest

from _problems import check_against_grid, random_problem
from ps_toolkit import analysis, coprime, exponent, expsum, psseq
from ps_toolkit.realpow import floor_pow

SQRT2 = "sqrt:2"

# max |weyl_sum| / vdc_bound over the criterion-10 grid; the sums are
# deterministic (certified phases, exactly rounded fsum) so this is a ceiling
WEYL_VDC_GOLDEN = 1.711703857061291
ET_CONSTANT_CAP = 10.0


def report(num: int, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d}: {detail}")
    assert ok, detail


def test_01_oracle_equivalence():
    t0 = time.perf_counter()
    bad = []
    for x in (50, 200, 1000, 2000):
        for c in (1, Fraction(3, 2), SQRT2, Fraction(5, 2)):
            mob = coprime.coprime_tuples_mobius(coprime.TupleSpec.build(x, [c, c]))
            brute = coprime.coprime_pairs_bruteforce(x, c)
            if mob != brute:
                bad.append((x, str(c), mob, brute))
    spec = coprime.TupleSpec.build(300, [1, Fraction(3, 2), Fraction(3, 2)])
    mob3, brute3 = coprime.coprime_tuples_mobius(spec), coprime.coprime_tuples_bruteforce(spec)
    if mob3 != brute3:
        bad.append((300, "1,3/2,3/2", mob3, brute3))
    dt = time.perf_counter() - t0
    report(1, not bad and dt < 60, f"17 Moebius/brute-force comparisons, mismatches={bad}, r=3 count={mob3}, {dt:.1f}s")


def _classical_table(n: int) -> np.ndarray:
    """Coprime ordered pairs in [1, x]^2 for every x <= n, from integer gcds."""
    a = np.arange(1, n + 1)
    cop = (np.gcd.outer(a, a) == 1).astype(np.int64)
    # pairs with max(m, n) == x: row x up to column x, plus column x above it
    diag = np.diag(cop)
    row = np.cumsum(cop, axis=1)[np.arange(n), np.arange(n)]
    return np.cumsum(2 * row - diag)


def test_02_integer_order_reduction():
    xs = list(range(1, 2001))
    table = _classical_table(2000)
    bad = []
    for c in (2, 3):
        counts = coprime.coprime_pair_counts(xs, c)
        bad += [(c, x) for x, got, want in zip(xs, counts, table) if got != want]
    spot = coprime.classical_coprime_pairs(300) == table[299]
    report(2, not bad and spot, f"c in {{2,3}}, every x <= 2000 equals the classical count; mismatches={bad[:5]}")


def test_03_classical_error():
    grid = analysis.geometric_grid(2**8, 2**17)
    curve = analysis.error_curve_pairs(grid, 1)
    C = max(e / (x * math.log(x)) for x, e in curve.samples)
    report(3, C <= 5, f"c=1, x=2^8..2^17: max |S-x^2/zeta(2)|/(x log x) = {C:.4f} (<= 5)")


def test_04_pair_slope():
    k = exponent.choose_k_special(Fraction(3, 2))
    bound = float(exponent.pair_error_exponent(k, Fraction(3, 2), 2)) + 0.15
    curve = analysis.error_curve_pairs(analysis.geometric_grid(2**8, 2**14), Fraction(3, 2))
    fit = analysis.fit_slope(curve)
    report(4, k == 3 and fit.slope <= bound, f"c=3/2: k={k}, slope={fit.slope:.4f} <= {bound:.4f}")


def test_05_partition_identity():
    rng = random.Random(5)
    bad = []
    for _ in range(200):
        x = Fraction(rng.randint(1, 10**7), 100)
        q = rng.randint(1, 1000)
        c = rng.choice((Fraction(3, 2), SQRT2))
        prof = psseq.residue_profile(x, q, c)
        counts = prof.counts.values() if prof.sparse else prof.counts
        if sum(counts) != math.floor(x):
            bad.append((x, q, str(c)))
    report(5, not bad, f"200 random (x, q, c): sum_a N_c(x;a,q) = [x]; failures={bad[:5]}")


def _squarefree(d: int) -> bool:
    return all(d % (p * p) for p in range(2, math.isqrt(d) + 1))


def test_06_integer_divisor_count():
    rng = random.Random(6)
    xs = sorted({10**4, 1, 2, 99, 100, 101, *(rng.randint(1, 10**4) for _ in range(40))})
    bad = [
        (x, d)
        for d in range(1, 101)
        if _squarefree(d)
        for x in xs
        if psseq.divisor_count(x, d, 2) != x // d
    ]
    report(6, not bad, f"c=2, squarefree d <= 100, {len(xs)} x values <= 10^4: count = [x/d]; failures={bad[:5]}")


@pytest.mark.slow
def test_07_certified_floors():
    t0 = time.perf_counter()
    c = Fraction(3, 2)
    bad = [n for n in range(1, 10**6 + 1) if floor_pow(n, c).value != math.isqrt(n**3)]
    dt = time.perf_counter() - t0
    report(7, not bad and dt < 30, f"c=3/2, n <= 10^6 vs isqrt(n^3): mismatches={bad[:5]}, {dt:.1f}s (< 30s)")


def test_08_exponent_algebra():
    checks = []
    for c in (Fraction(1), Fraction(5, 4), Fraction(3, 2), Fraction(7, 3), Fraction(5, 2)):
        checks.append(exponent.ap_exponent(1, c) == (c, Fraction(-1)))
        checks.append(exponent.ap_exponent(2, c) == ((c + 1) / 3, Fraction(-1, 3)))
        checks.append(exponent.ap_exponent(3, c) == ((c + 4) / 7, Fraction(-1, 7)))
        if c < 2:
            checks.append(exponent.pair_error_exponent(2, c) == (c + 4) / 3)
        checks.append(exponent.pair_error_exponent(3, c) == (c + 11) / 7)
        for k in range(1, 7):
            th = exponent.crossing_exponent(k, c)
            checks.append(th == c + 1 - k - Fraction(1, 2**k))
            # at q = x^th the k and k+1 bounds coincide
            a, b = exponent.ap_exponent(k, c), exponent.ap_exponent(k + 1, c)
            checks.append(a[0] + a[1] * th == b[0] + b[1] * th)
    for c in (Fraction(5, 4) - Fraction(1, 100), Fraction(5, 4) + Fraction(1, 100)):
        above = c > Fraction(5, 4)
        checks.append(((c + 4) / 3 < (2 * c + 1) / 2) == above)
        checks.append(((c + 11) / 7 < (c + 4) / 3) == above)
    c = Fraction(5, 4)
    checks.append((c + 4) / 3 == (2 * c + 1) / 2 and (c + 11) / 7 == (c + 4) / 3)
    report(8, all(checks), f"{sum(checks)}/{len(checks)} exact identities hold")


def test_09_optimizer_oracle():
    rng = random.Random(9)
    bad = []
    for i in range(100):
        exact, grid, tol = check_against_grid(random_problem(rng))
        if not (exact <= grid + 1e-9 and grid - exact <= tol):
            bad.append(i)
    for k in range(2, 7):
        for c in (Fraction(1), Fraction(3, 2), Fraction(9, 5)):
            if c >= k:
                continue
            res = exponent.optimize(exponent.ap_block_problem(k, c))
            want = exponent.LogMonomial.of(M=1 - (k - c) / (2**k - 1), q=Fraction(-1, 2**k - 1))
            if res.value != want:
                bad.append((k, c))
    report(9, not bad, f"100 random problems vs grid search and block instance k=2..6; failures={bad}")


@pytest.mark.slow
def test_10_empirical_lemmas():
    c = Fraction(3, 2)
    worst = 0.0
    for j in range(17):
        block = expsum.DyadicBlock(2**j, 2 ** (j + 1))
        for q in (1, 3, 7):
            for h in range(1, 9):
                p = expsum.PhaseParams(h, q, c)
                s = abs(expsum.weyl_sum(block, p))
                F = expsum.phase_scale(p, block.M)
                for k in (2, 3):
                    worst = max(worst, s / expsum.vdc_bound(F, len(block), k))
    et = 0.0
    for j in range(15):
        ns = expsum.DyadicBlock(2**j, 2 ** (j + 1)).integers()
        for q in (1, 3, 7):
            vals = tuple(expsum.ps_fractions(ns, q, c))
            for a in range(q):
                for lo, hi in ((0, 0.5), (0.25, 0.75), (a / q, (a + 1) / q)):
                    lhs, rhs = expsum.et_sides(expsum.EtBoundInput(vals, lo, hi, len(ns) ** 0.5))
                    et = max(et, lhs / rhs)
    ok = math.isfinite(worst) and worst <= WEYL_VDC_GOLDEN and et <= ET_CONSTANT_CAP
    report(10, ok, f"max |weyl|/vdc = {worst!r} (golden {WEYL_VDC_GOLDEN!r}); Erdos-Turan C = {et:.4f} (<= 10)")


def test_11_dd_ratio():
    target = 1 / coprime.zeta(2)
    ratios = {str(c): psseq.dd_coprime_count(10**5, c) / 10**5 for c in (Fraction(3, 2), SQRT2)}
    ok = all(abs(r - target) <= 0.02 for r in ratios.values())
    shown = ", ".join(f"c={c}: {r:.5f}" for c, r in ratios.items())
    report(11, ok, f"{shown}; 1/zeta(2) = {target:.5f}, tolerance 0.02")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
