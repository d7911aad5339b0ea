"""Command-line front end.

    vpcalc verify [--format csv|text] [--tol T] [--seed S]
    vpcalc reduce "VP[1/(x-z1)]*VP[1/(x-z2)]" [--var x]
    vpcalc integrate "VP[1/(x-z)]*x^2" "x:0:1, z:0:1" [--param z=1/2]
    vpcalc quad pv --pole 0.5 --n 1 [--a 0 --b 1] [--f "x^2"] [--eps0 E]
    vpcalc quad log|dilog|multiple|bracket|simplex ...
    vpcalc iz_scan --min -0.9 --max 3 --steps 40 --route both

Exit status: 0 on success, 1 when verification fails or a computation is
refused, 2 on parse or specification errors.
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
from collections import Counter
from fractions import Fraction

import numpy as np

from . import oracle, scenarios
from .dsl import format_expr, parse_expr
from .errors import ParseError, ThresholdUndefined, VPCalcError
from .integrate import IntegrationSpec, integrate_with_estimate
from .numeric import evaluate_expr
from .reduction import canonicalize, reduce_in

DEFAULT_TOL = 1e-8


class UsageError(Exception):
    """Bad command-line input (exit status 2)."""


def _g(x) -> str:
    return "" if x is None else f"{float(x):.15g}"


def _finite(name: str, value: float) -> float:
    if not math.isfinite(value):
        raise UsageError(f"{name} must be finite")
    return value


def _parse(src: str):
    try:
        return parse_expr(src)
    except ParseError as exc:
        raise UsageError(f"parse error: {exc}") from exc


def _spec(src: str) -> IntegrationSpec:
    try:
        return IntegrationSpec.parse(src)
    except (ParseError, ValueError) as exc:
        raise UsageError(f"bad integration spec: {exc}") from exc


def _params(items) -> dict[str, Fraction]:
    out = {}
    for item in items or ():
        name, sep, val = item.partition("=")
        if not sep or not name.strip():
            raise UsageError(f"bad parameter {item!r}; expected name=value")
        try:
            out[name.strip()] = Fraction(val.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad parameter value {val!r}") from exc
    return out


def _reduction_variable(e) -> str:
    """The variable carried by two or more poles of some term."""
    best: Counter = Counter()
    for t in e.terms:
        counts = Counter(v for f in t.factors if f.kind == "pole" for v in f.vars())
        best.update({v: 1 for v, k in counts.items() if k >= 2})
    if not best:
        raise UsageError("no product of poles sharing a variable; pass --var")
    return min(best, key=lambda v: (-best[v], v))


# --------------------------------------------------------------------------
# commands

def cmd_verify(args) -> int:
    reports = scenarios.verify_suite(tol_scale=args.tol / DEFAULT_TOL, seed=args.seed,
                                     samples=args.samples, cases=args.cases)
    if args.format == "csv":
        sys.stdout.write(scenarios.reports_to_csv(reports))
    else:
        sys.stdout.write(scenarios.reports_to_text(reports))
        if args.tol != DEFAULT_TOL:
            print("tightest margins (abs_error / tolerance):")
            for r in scenarios.tightest(reports):
                print(f"  {r.name}: {r.margin:.3g}")
    return 0 if all(r.passed for r in reports) else 1


def cmd_reduce(args) -> int:
    e = _parse(args.expr)
    var = args.var or _reduction_variable(e)
    print(format_expr(canonicalize(reduce_in(e, var))))
    return 0


def cmd_integrate(args) -> int:
    e = _parse(args.expr)
    spec = _spec(args.spec)
    try:
        res = integrate_with_estimate(e, spec, params=_params(args.param), form=args.form)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.format == "csv":
        print("value,error_estimate")
        print(f"{_g(res.value)},{_g(res.error_estimate)}")
    else:
        print(f"{_g(res.value)} +- {res.error_estimate:.3g}")
        if args.show:
            print(format_expr(res.expr))
    return 0


def _poly_fn(src: str | None):
    if not src:
        return lambda x: np.ones_like(np.asarray(x, float))
    e = _parse(src)
    if e.free_vars - {"x"} or any(f.kind != "mono" for t in e.terms for f in t.factors):
        raise UsageError("--f must be a polynomial in x")
    return lambda x: np.broadcast_to(evaluate_expr(e, {"x": np.asarray(x, float)}), np.shape(x)) * 1.0


def cmd_quad(args) -> int:
    k = args.kind
    a, b = _finite("--a", args.a), _finite("--b", args.b)
    if k == "pv":
        f = _poly_fn(args.f)
        if args.n > 1 and args.f:
            raise UsageError("--f is only supported with --n 1 (higher poles need derivatives); use f = 1")
        kw = {"cauchy_tol": args.tol}
        if args.eps0 is not None:
            kw["eps0"] = args.eps0
        res = oracle.pv_quad(f, _finite("--pole", args.pole), args.n, a, b, **kw)
    elif k == "log":
        res = oracle.log_quad(_poly_fn(args.f), _finite("--c", args.c), a, b)
    elif k == "dilog":
        val = oracle.dilog(_finite("--z", args.z))
        res = oracle.QuadResult(val, 1e-12 * max(1.0, abs(val)), 0)
    elif k == "multiple":
        try:
            poles = [int(p) for p in args.poles.split(",")]
        except ValueError as exc:
            raise UsageError("--poles takes a comma-separated list of degrees") from exc
        res = oracle.multiple_integral_regular(poles)
    elif k == "bracket":
        res = oracle.bracket_term_cube()
    else:  # simplex
        res = oracle.simplex_regular(_finite("--z", args.z))
    if args.format == "csv":
        print("value,error_estimate,evaluations")
        print(f"{_g(res.value)},{_g(res.error_estimate)},{res.evaluations}")
    else:
        print(f"{_g(res.value)} +- {res.error_estimate:.3g}")
    return 0


def scan_rows(z_min: float, z_max: float, steps: int, route: str):
    """Yield ``(z, A, B, oracle, disagreement)`` rows, or ``None`` for a skipped threshold."""
    # linspace rounding can land a few ulps off zero; treat such points as the threshold
    snap = 8 * np.finfo(float).eps * max(abs(z_min), abs(z_max))
    for z in np.linspace(z_min, z_max, steps):
        z = float(z)
        if abs(z) <= snap:
            yield None
            continue
        vals = {}
        if route in ("A", "both") and z > 0:
            vals["A"] = scenarios.simplex_route_a(z)
        if route in ("B", "both"):
            vals["B"] = scenarios.simplex_route_b(z)
        vals["oracle"] = oracle.simplex_regular(z).value
        xs = list(vals.values())
        dis = max((abs(p - q) for i, p in enumerate(xs) for q in xs[i + 1:]), default=0.0)
        yield z, vals.get("A"), vals.get("B"), vals["oracle"], dis


def cmd_iz_scan(args) -> int:
    lo, hi = _finite("--min", args.min), _finite("--max", args.max)
    if args.steps < 1:
        raise UsageError("--steps must be >= 1")
    if lo <= -1:
        raise UsageError("I(z) is defined for z > -1")
    if lo > hi:
        raise UsageError("--min must not exceed --max")
    out = csv.writer(sys.stdout, lineterminator="\n")
    if args.format == "csv":
        out.writerow(["z", "I_route_A", "I_route_B", "oracle", "abs_disagreement"])
    for row in scan_rows(lo, hi, args.steps, args.route):
        if row is None:
            sys.stdout.write("# z=0 skipped: threshold, I(z) undefined\n")
            continue
        cells = [_g(c) for c in row]
        if args.format == "csv":
            out.writerow(cells)
        else:
            print("  ".join(f"{c:>22}" for c in cells))
    return 0


# --------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="oracle tolerance (default 1e-8)")
    common.add_argument("--eps0", type=float, default=None, help="start of the excision schedule")
    common.add_argument("--seed", type=int, default=0, help="seed for random test functions")
    common.add_argument("--format", choices=("csv", "text"), default=None,
                        help="output format (default: csv for iz_scan, text otherwise)")

    p = argparse.ArgumentParser(prog="vpcalc", description="Products of principal-value poles: "
                                "reduction, repeated integration and numeric checks.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run the verification suite")
    v.add_argument("--samples", type=int, default=5, help="random test functions per pole pair")
    v.add_argument("--cases", type=int, default=1000, help="cases per property check")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("reduce", parents=[common], help="reduce products of poles in one variable")
    r.add_argument("expr")
    r.add_argument("--var", default=None, help="variable to reduce in (default: inferred)")
    r.set_defaults(func=cmd_reduce)

    i = sub.add_parser("integrate", parents=[common], help="repeated integral of an expression")
    i.add_argument("expr")
    i.add_argument("spec", help='steps innermost first, e.g. "x:0:1, z:0:1"')
    i.add_argument("--param", action="append", metavar="NAME=VALUE", help="exact parameter value")
    i.add_argument("--form", choices=("auto", "explicit", "derivative"), default="auto")
    i.add_argument("--show", action="store_true", help="also print the symbolic result")
    i.set_defaults(func=cmd_integrate)

    q = sub.add_parser("quad", parents=[common], help="oracle quadrature")
    q.add_argument("kind", choices=("pv", "log", "dilog", "multiple", "bracket", "simplex"))
    q.add_argument("--pole", type=float, default=0.5)
    q.add_argument("--n", type=int, default=1)
    q.add_argument("--a", type=float, default=0.0)
    q.add_argument("--b", type=float, default=1.0)
    q.add_argument("--c", type=float, default=0.0)
    q.add_argument("--z", type=float, default=1.0)
    q.add_argument("--f", default=None, help="polynomial in x (default 1)")
    q.add_argument("--poles", default="1,1", help="degrees for 'multiple'")
    q.set_defaults(func=cmd_quad)

    s = sub.add_parser("iz_scan", parents=[common], help="scan the simplex integral I(z)")
    s.add_argument("--min", type=float, default=-0.9)
    s.add_argument("--max", type=float, default=3.0)
    s.add_argument("--steps", type=int, default=40)
    s.add_argument("--route", choices=("A", "B", "both"), default="both")
    s.set_defaults(func=cmd_iz_scan)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = "csv" if args.command == "iz_scan" else "text"
    try:
        if hasattr(args, "tol"):
            _finite("--tol", args.tol)
        return args.func(args)
    except UsageError as exc:
        print(f"vpcalc: {exc}", file=sys.stderr)
        return 2
    except ParseError as exc:
        print(f"vpcalc: parse error: {exc}", file=sys.stderr)
        return 2
    except (VPCalcError, ThresholdUndefined) as exc:
        print(f"vpcalc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
