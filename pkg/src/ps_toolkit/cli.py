"""Command-line front end.

Every subcommand prints one JSON document (``schema: 1``) or CSV.  Exact
values are rendered as ``{"exact": "11/6", "decimal": "1.833333333333"}``.

Exit codes: 0 ok, 2 bad arguments, 3 budget exceeded, 4 route disagreement.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from fractions import Fraction
from typing import Any, Callable, Optional, Sequence

from . import analysis, coprime, exponent, expsum, psseq, realpow
from ._parallel import default_workers
from .errors import BudgetExceeded, UnboundedBelow
from .factor import FactorBudget

SCHEMA = 1
EXIT_PARSE = 2
EXIT_BUDGET = 3
EXIT_MISMATCH = 4

DECIMAL_DIGITS = 15


class RouteMismatch(Exception):
    def __init__(self, payload: dict):
        super().__init__("routes disagree")
        self.payload = payload


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def num(v: Any) -> Any:
    """Exact + decimal rendering for numbers; other values pass through."""
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, int):
        return {"exact": str(v), "decimal": str(v)}
    if isinstance(v, Fraction):
        return {"exact": str(v), "decimal": _dec(v)}
    if isinstance(v, float):
        return {"decimal": repr(v)}
    if isinstance(v, complex):
        return {"re": num(v.real), "im": num(v.imag), "abs": num(abs(v))}
    return v


def _dec(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    return f"{float(v):.{DECIMAL_DIGITS}g}"


def _monomial(m: exponent.LogMonomial) -> dict:
    return {"text": str(m), "exponents": {k: num(e) for k, e in m.exps}}


# ---------------------------------------------------------------------------
# argument types
# ---------------------------------------------------------------------------


def real_arg(text: str):
    """Counting limits: plain integers stay int, anything else is an exact Fraction."""
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a real number: {text!r}") from exc


def order_arg(text: str) -> realpow.OrderSpec:
    try:
        return realpow.OrderSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def rational_arg(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from exc


def rational_order_arg(text: str) -> Fraction:
    c = order_arg(text)
    if not c.is_rational:
        raise argparse.ArgumentTypeError("exponent algebra needs a rational order")
    return c.as_fraction()


def monomial_arg(text: str) -> exponent.LogMonomial:
    """``"M=1,H=-1"`` -> M H^-1; ``"1"`` is the constant monomial."""
    text = text.strip()
    if text in ("", "1"):
        return exponent.ONE
    out = {}
    try:
        for part in text.split(","):
            name, _, e = part.partition("=")
            out[name.strip()] = Fraction(e.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad monomial {text!r}; use var=exp,...") from exc
    return exponent.LogMonomial.of(out)


def point_arg(text: str) -> dict:
    return monomial_arg(text).as_dict()


def grid_arg(text: str) -> list:
    """``start:stop[:ratio]`` geometric grid or an explicit comma list."""
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) not in (2, 3):
                raise ValueError
            return analysis.geometric_grid(parts[0], parts[1], parts[2] if len(parts) == 3 else 2)
        return [real_arg(p) for p in text.split(",")]
    except (ValueError, argparse.ArgumentTypeError) as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from exc


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_floor(a) -> dict:
    cert = realpow.floor_pow(a.n, a.c)
    return {"n": cert.n, "value": num(cert.value), "bits": cert.bits, "exact": cert.exact}


def cmd_frac(a) -> dict:
    v = realpow.frac_part_scaled(a.n, a.h, a.q, a.c, a.eps)
    return {"value": num(v), "eps": a.eps}


def cmd_count_ap(a) -> dict:
    return {"count": num(psseq.count_ap(a.x, a.a, a.q, a.c, a.workers))}


def cmd_residue_profile(a) -> dict:
    prof = psseq.residue_profile(a.x, a.q, a.c, a.workers)
    return {"sparse": prof.sparse, "total": num(prof.total()), "counts": {str(k): v for k, v in prof.nonzero().items()}}


def cmd_divisor_count(a) -> dict:
    return {"count": num(psseq.divisor_count(a.x, a.d, a.c, a.workers))}


def cmd_ap_report(a) -> dict:
    rep = psseq.ap_error_report(a.x, a.a, a.q, a.c, a.k, a.workers)
    return {"count": num(rep.count), "observed": num(rep.observed), "theoretical": num(rep.theoretical), "ratio": num(rep.ratio), "k": rep.k}


def cmd_dd_count(a) -> dict:
    n = psseq.dd_coprime_count(a.x, a.c, a.workers)
    lim = psseq.limit_of(a.x)
    return {"count": num(n), "ratio": num(Fraction(n, lim)), "limit": num(1 / coprime.zeta(2))}


def cmd_tau_sum(a) -> dict:
    return {"value": num(psseq.tau_sum(a.x, a.c, a.workers))}


def _routes(a, brute: Callable[[], int], mobius: Callable[[], int]) -> dict:
    out: dict = {"route": a.route}
    if a.route in ("brute", "both"):
        out["brute"] = num(brute())
    if a.route in ("mobius", "both"):
        out["mobius"] = num(mobius())
    if a.route == "both":
        agree = out["brute"] == out["mobius"]
        out["agreement"] = agree
        if not agree:
            raise RouteMismatch(out)
    out["count"] = out.get("mobius", out.get("brute"))
    return out


def cmd_coprime_pairs(a) -> dict:
    budget = FactorBudget(trial_limit=a.factor_budget)
    spec = coprime.TupleSpec.build(a.x, [a.c, a.c])
    out = _routes(
        a,
        lambda: coprime.coprime_pairs_bruteforce(a.x, a.c, a.max_pairs),
        lambda: coprime.coprime_tuples_mobius(spec, a.workers, budget),
    )
    out["main_term"] = num(coprime.main_term(a.x, 2))
    return out


def cmd_coprime_tuples(a) -> dict:
    budget = FactorBudget(trial_limit=a.factor_budget)
    spec = coprime.TupleSpec.build(a.x, a.c)
    out = _routes(
        a,
        lambda: coprime.coprime_tuples_bruteforce(spec, a.max_pairs),
        lambda: coprime.coprime_tuples_mobius(spec, a.workers, budget),
    )
    out["orders"] = [str(c) for c in spec.orders]
    out["main_term"] = num(coprime.main_term(a.x, spec.r))
    return out


def cmd_zeta(a) -> dict:
    return {"zeta": num(coprime.zeta(a.r)), "main_term": num(coprime.main_term(a.x, a.r))}


def cmd_weyl_sum(a) -> dict:
    block = expsum.DyadicBlock(a.M, a.M2 if a.M2 is not None else 2 * a.M)
    p = expsum.PhaseParams(a.h, a.q, a.c)
    s = expsum.weyl_sum(block, p, a.eps, a.negate)
    return {"sum": num(s), "terms": len(block), "error_bound": num(expsum.weyl_error_bound(block, a.eps)),
            "F": num(expsum.phase_scale(p, a.M))}


def cmd_vdc_bound(a) -> dict:
    return {"bound": num(expsum.vdc_bound(float(a.F), float(a.N), a.k))}


def cmd_et_sides(a) -> dict:
    block = expsum.DyadicBlock(a.M, a.M2 if a.M2 is not None else 2 * a.M)
    ns = block.integers()
    vals = expsum.ps_fractions(ns, a.q, a.c, a.eps)
    H = float(a.H) if a.H is not None else len(ns) ** 0.5
    lhs, rhs = expsum.et_sides(expsum.EtBoundInput(tuple(vals), float(a.alpha), float(a.beta), H))
    return {"lhs": num(lhs), "rhs": num(rhs), "N": len(ns), "H": num(H), "ratio": num(lhs / rhs)}


def cmd_optimize(a) -> dict:
    if a.ap_instance is not None:
        k, c = a.ap_instance
        prob = exponent.ap_block_problem(int(k), Fraction(c), full=a.full)
        if a.at:
            prob = exponent.OptProblem(prob.increasing, prob.decreasing, prob.var, prob.lower, prob.upper, a.at)
    else:
        prob = exponent.OptProblem(tuple(a.inc), tuple(a.dec), a.var, a.lower, a.upper, a.at)
    res = exponent.optimize(prob)
    return {"value": _monomial(res.value), "argmin": _monomial(res.argmin) if res.argmin else None, "source": res.source}


def cmd_ap_exponent(a) -> dict:
    x_exp, q_exp = exponent.ap_exponent(a.k, a.c)
    return {"x_exp": num(x_exp), "q_exp": num(q_exp)}


def cmd_best_k(a) -> dict:
    k = exponent.best_k_for_modulus(a.c, a.theta)
    return {"k": k, "bound_exponent": num(exponent.ap_bound_exponent(k, a.c, a.theta)),
            "threshold_below": num(exponent.crossing_exponent(k, a.c))}


def cmd_pair_exponent(a) -> dict:
    return {"exponent": num(exponent.pair_error_exponent(a.k, a.c, a.r))}


def cmd_choose_k(a) -> dict:
    k = exponent.choose_k_special(a.c)
    return {"k": k, "exponent": num(exponent.pair_error_exponent(k, a.c, a.r)),
            "special_exponent": num(exponent.special_exponent(a.c, a.r))}


def _curve(a) -> analysis.ErrorCurve:
    if a.kind == "pairs":
        return analysis.error_curve_pairs(a.grid, a.c, r=a.r, workers=a.workers)
    if a.kind == "ap":
        return analysis.error_curve_ap(a.grid, a.a, a.q, a.c, a.workers)
    return analysis.error_curve_dd(a.grid, a.c, a.workers)


def cmd_error_curve(a):
    curve = _curve(a)
    rows = analysis.report_rows(curve, a.exponent)
    return {"meta": {k: v for k, v in curve.meta.items() if k != "counts"},
            "counts": [num(n) for n in curve.meta["counts"]],
            "rows": [{k: num(v) for k, v in r.items()} for r in rows], "_rows": rows}


def cmd_fit(a) -> dict:
    curve = _curve(a)
    fit = analysis.fit_slope(curve)
    out = {"slope": num(fit.slope), "intercept": num(fit.intercept), "residual": num(fit.residual),
           "n_points": fit.n_points, "dropped_zeros": fit.dropped_zeros}
    if a.exponent is not None:
        out["exponent"] = num(a.exponent)
        out["constant"] = num(analysis.constant_fit(curve, a.exponent))
        out["slope_excess"] = num(fit.slope - float(a.exponent))
    return out


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="write to FILE instead of stdout")
    common.add_argument("--workers", type=int, default=default_workers())
    common.add_argument("--max-bits", type=int, help="precision cap (overrides PS_TOOLKIT_MAX_BITS)")
    common.add_argument("--max-pairs", type=int, default=coprime.MAX_PAIRS, help="brute-force size guard")
    common.add_argument("--factor-budget", type=int, default=10**6, help="trial-division prime bound")

    p = argparse.ArgumentParser(prog="ps-toolkit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    sp = add("floor", cmd_floor, "certified [n^c]")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--c", type=order_arg, required=True)

    sp = add("frac", cmd_frac, "certified {h n^c / q}")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--h", type=int, default=1)
    sp.add_argument("--q", type=int, default=1)
    sp.add_argument("--c", type=order_arg, required=True)
    sp.add_argument("--eps", type=float, default=expsum.DEFAULT_EPS)

    for name, func, help_ in (
        ("count-ap", cmd_count_ap, "N_c(x; a, q)"),
        ("ap-report", cmd_ap_report, "observed vs theoretical AP error"),
    ):
        sp = add(name, func, help_)
        sp.add_argument("--x", type=real_arg, required=True)
        sp.add_argument("--a", type=int, default=0)
        sp.add_argument("--q", type=int, required=True)
        sp.add_argument("--c", type=order_arg, required=True)
        if name == "ap-report":
            sp.add_argument("--k", type=int, required=True)

    sp = add("residue-profile", cmd_residue_profile, "N_c(x; a, q) for every a")
    sp.add_argument("--x", type=real_arg, required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--c", type=order_arg, required=True)

    sp = add("divisor-count", cmd_divisor_count, "#{n <= x : d | [n^c]}")
    sp.add_argument("--x", type=real_arg, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--c", type=order_arg, required=True)

    for name, func, help_ in (
        ("dd-count", cmd_dd_count, "#{n <= x : (n, [n^c]) = 1}"),
        ("tau-sum", cmd_tau_sum, "sum of tau([n^c])"),
    ):
        sp = add(name, func, help_)
        sp.add_argument("--x", type=real_arg, required=True)
        sp.add_argument("--c", type=order_arg, required=True)

    sp = add("coprime-pairs", cmd_coprime_pairs, "coprime pairs of sequence values")
    sp.add_argument("--x", type=real_arg, required=True)
    sp.add_argument("--c", type=order_arg, required=True)
    sp.add_argument("--route", choices=("brute", "mobius", "both"), default="mobius")

    sp = add("coprime-tuples", cmd_coprime_tuples, "coprime r-tuples, mixed orders")
    sp.add_argument("--x", type=real_arg, required=True)
    sp.add_argument("--c", type=order_arg, action="append", required=True, help="repeat once per coordinate")
    sp.add_argument("--route", choices=("brute", "mobius", "both"), default="mobius")

    sp = add("zeta", cmd_zeta, "zeta(r) and x^r / zeta(r)")
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--x", type=real_arg, default=1)

    sp = add("weyl-sum", cmd_weyl_sum, "sum over M < n <= M2 of e(h n^c / q)")
    sp.add_argument("--M", type=int, required=True)
    sp.add_argument("--M2", type=int)
    sp.add_argument("--h", type=int, default=1)
    sp.add_argument("--q", type=int, default=1)
    sp.add_argument("--c", type=order_arg, required=True)
    sp.add_argument("--eps", type=float, default=expsum.DEFAULT_EPS)
    sp.add_argument("--negate", action="store_true")

    sp = add("vdc-bound", cmd_vdc_bound, "k-th derivative bound, no constant")
    sp.add_argument("--F", type=rational_arg, required=True)
    sp.add_argument("--N", type=rational_arg, required=True)
    sp.add_argument("--k", type=int, required=True)

    sp = add("et-sides", cmd_et_sides, "Erdos-Turan sides for {n^c / q} over a block")
    sp.add_argument("--M", type=int, required=True)
    sp.add_argument("--M2", type=int)
    sp.add_argument("--q", type=int, default=1)
    sp.add_argument("--c", type=order_arg, required=True)
    sp.add_argument("--alpha", type=rational_arg, default=Fraction(0))
    sp.add_argument("--beta", type=rational_arg, default=Fraction(1, 2))
    sp.add_argument("--H", type=rational_arg, help="default sqrt(N)")
    sp.add_argument("--eps", type=float, default=expsum.DEFAULT_EPS)

    sp = add("optimize", cmd_optimize, "minimise a max of monotone monomials")
    sp.add_argument("--inc", type=monomial_arg, action="append", default=[], help='e.g. "H=1/2,q=-1/2"')
    sp.add_argument("--dec", type=monomial_arg, action="append", default=[], help='e.g. "M=1,H=-1"')
    sp.add_argument("--var", default="H")
    sp.add_argument("--lower", type=monomial_arg)
    sp.add_argument("--upper", type=monomial_arg)
    sp.add_argument("--at", type=point_arg, help="log-values of the other variables")
    sp.add_argument("--ap-instance", nargs=2, metavar=("K", "C"), help="use the AP block problem")
    sp.add_argument("--full", action="store_true", help="with --ap-instance: all four terms and H <= qM")

    sp = add("ap-exponent", cmd_ap_exponent, "exponents of x and q in the AP error term")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--c", type=rational_order_arg, required=True)

    sp = add("best-k", cmd_best_k, "best k for q = x^theta")
    sp.add_argument("--c", type=rational_order_arg, required=True)
    sp.add_argument("--theta", type=rational_arg, required=True)

    sp = add("pair-exponent", cmd_pair_exponent, "r - (k-c)/(2^k-1)")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--c", type=rational_order_arg, required=True)
    sp.add_argument("--r", type=int, default=2)

    sp = add("choose-k", cmd_choose_k, "k from the order alone")
    sp.add_argument("--c", type=rational_order_arg, required=True)
    sp.add_argument("--r", type=int, default=2)

    for name, func, help_ in (
        ("error-curve", cmd_error_curve, "observed error over a grid"),
        ("fit", cmd_fit, "log-log slope of an error curve"),
    ):
        sp = add(name, func, help_)
        sp.add_argument("--kind", choices=("pairs", "ap", "dd"), default="pairs")
        sp.add_argument("--c", type=order_arg, required=True)
        sp.add_argument("--grid", type=grid_arg, required=True, help="start:stop[:ratio] or a,b,c")
        sp.add_argument("--r", type=int, default=2)
        sp.add_argument("--a", type=int, default=0)
        sp.add_argument("--q", type=int, default=1)
        sp.add_argument("--exponent", type=rational_arg, help="theoretical exponent for ratios")

    return p


def _to_csv(result: dict) -> str:
    rows = result.get("_rows")
    if rows is not None:
        return analysis.rows_to_csv(rows)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["field", "value"])
    for k, v in sorted(result.items()):
        if isinstance(v, dict) and "decimal" in v:
            v = v.get("exact", v["decimal"])
        elif not isinstance(v, (str, int, float, bool)) and v is not None:
            v = json.dumps(v, sort_keys=True)
        w.writerow([k, v])
    return buf.getvalue()


def _params(args: argparse.Namespace) -> dict:
    skip = {"func", "format", "out", "workers", "command"}
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in skip or v is None:
            continue
        if isinstance(v, list):
            v = [str(x) if not isinstance(x, (int, bool)) else x for x in v]
        elif isinstance(v, dict):
            v = {a: str(b) for a, b in v.items()}
        elif not isinstance(v, (int, float, bool, str)):
            v = str(v)
        out[k] = v
    return out


def run(argv: Optional[Sequence[str]] = None) -> tuple[int, str, Optional[str]]:
    """Parse, execute and serialise; returns (exit status, output text, --out path)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), "", None
    if args.workers < 1 or args.max_pairs < 1 or args.factor_budget < 2:
        parser.print_usage(sys.stderr)
        print("ps-toolkit: error: budgets and worker count must be positive", file=sys.stderr)
        return EXIT_PARSE, "", None
    if args.max_bits is not None and args.max_bits < realpow.START_BITS:
        parser.print_usage(sys.stderr)
        print(f"ps-toolkit: error: --max-bits must be >= {realpow.START_BITS}", file=sys.stderr)
        return EXIT_PARSE, "", None

    status = 0
    # the cap travels through the environment so worker processes see it too
    saved_bits = os.environ.get(realpow.MAX_BITS_ENV)
    if args.max_bits is not None:
        os.environ[realpow.MAX_BITS_ENV] = str(args.max_bits)
    started = time.perf_counter()
    try:
        result = args.func(args)
    except RouteMismatch as exc:
        result, status = exc.payload, EXIT_MISMATCH
    except BudgetExceeded as exc:
        result, status = {"error": "budget_exceeded", "detail": str(exc)}, EXIT_BUDGET
    except UnboundedBelow as exc:
        result, status = {"error": "unbounded_below", "detail": str(exc)}, EXIT_PARSE
    except (ValueError, TypeError) as exc:
        result, status = {"error": "invalid_input", "detail": str(exc)}, EXIT_PARSE
    finally:
        if saved_bits is None:
            os.environ.pop(realpow.MAX_BITS_ENV, None)
        else:
            os.environ[realpow.MAX_BITS_ENV] = saved_bits
    elapsed = time.perf_counter() - started

    if args.format == "csv":
        text = _to_csv(result)
    else:
        doc = {
            "schema": SCHEMA,
            "command": args.command,
            "params": _params(args),
            "result": {k: v for k, v in result.items() if not k.startswith("_")},
            "status": status,
            "elapsed_seconds": round(elapsed, 6),
        }
        text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    return status, text, args.out


def main(argv: Optional[Sequence[str]] = None) -> int:
    status, text, out = run(argv)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    elif text:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
