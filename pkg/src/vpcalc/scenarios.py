"""Worked examples and the verification suite.

* the unit-cube determination of the delta-delta constant ``C2``;
* the simplex integral ``I(z)`` by the direct route (A), by the
  change of variables ``xi = x + y, eta = (x - y)/2`` (B), through the
  symbolic pipeline and through the nested numeric oracle;
* :func:`verify_suite`, which runs every check with stable names and
  returns one :class:`ScenarioReport` per check.
"""
from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Callable, Iterable, Sequence

import numpy as np

from .coeff import PI2, PiCoeff, coeff_add, coeff_mul
from .algebra import Poly
from .dsl import format_expr, parse_expr
from .errors import DeltaAtEndpoint, PoleAtEndpoint, ThresholdUndefined, VPCalcError
from .expr import DistExpr, normalize
from .integrate import IntegrationSpec, integrate_with_estimate
from .oracle import (bracket_term_cube, dilog, multiple_integral_regular, pv_quad,
                     simplex_regular)
from .reduction import canonically_equal, four_pole_closed_form, reduce_product, three_pole_closed_form
from .sampling import random_coeff, random_delta_chain, random_expr, random_poly
from .testfn import random_testfn

PI2_F = math.pi ** 2


@dataclass(frozen=True)
class ScenarioReport:
    name: str
    computed: float
    expected: float | PiCoeff
    abs_error: float
    passed: bool
    runtime_ms: float
    tolerance: float = 0.0
    values: dict = field(default_factory=dict)
    note: str = ""

    @property
    def margin(self) -> float:
        """``abs_error / tolerance``; values near 1 are the tight spots."""
        return self.abs_error / self.tolerance if self.tolerance else 0.0


def _report(name: str, computed: float, expected, tol: float, t0: float, values=None, note="",
            error: float | None = None) -> ScenarioReport:
    err = abs(float(computed) - float(expected)) if error is None else float(error)
    return ScenarioReport(name, float(computed), expected, err, bool(err <= tol),
                          (time.perf_counter() - t0) * 1e3, tol, dict(values or {}), note)


# --------------------------------------------------------------------------
# unit cube

def cube_c2_determination(tol: float = 1e-6, c2_tol: float | None = None
                          ) -> tuple[ScenarioReport, ScenarioReport, ScenarioReport]:
    """Regular-order value, bracket term and the inferred ``C2``.

    ``I_regular = I_bracket + C2 * int delta(x-z1) delta(x-z2)`` and the delta
    integral over the unit cube is 1, so ``C2 = I_regular - I_bracket``.
    """
    t0 = time.perf_counter()
    reg = multiple_integral_regular([1, 1])
    r1 = _report("cube.regular_order", reg.value, PiCoeff.pi2(1, Fraction(1, 3)), tol, t0)
    t0 = time.perf_counter()
    br = bracket_term_cube()
    r2 = _report("cube.bracket_term", br.value, PiCoeff.pi2(1, Fraction(-2, 3)), tol, t0)
    c2 = reg.value - br.value
    c2_tol = 10 * tol if c2_tol is None else c2_tol
    r3 = ScenarioReport("cube.c2", c2, PI2, abs(c2 - PI2_F), abs(c2 - PI2_F) <= c2_tol,
                        r1.runtime_ms + r2.runtime_ms, c2_tol,
                        {"regular": reg.value, "bracket": br.value})
    return r1, r2, r3


# --------------------------------------------------------------------------
# simplex integral

SIMPLEX_EXPR = "-1 * VP[1/(eta+1/2*xi-1)] * VP[1/(eta-1/2*xi+1)]"


def simplex_route_a(z: float) -> float:
    """``2 dilog(1 + 1/z) + ln^2 z - pi^2/6``, stated for ``z > 0`` only."""
    if z == 0:
        raise ThresholdUndefined("z = 0 is the threshold")
    if z < 0:
        raise ValueError("the direct route is only available for z > 0")
    return 2 * dilog(1 + 1 / z) + math.log(z) ** 2 - PI2_F / 6


def simplex_route_b(z: float) -> float:
    """``-2 dilog(1 + z) + pi^2/2 - pi^2 theta(z)`` for ``z > -1``."""
    if z == 0:
        raise ThresholdUndefined("z = 0 is the threshold; use one-sided limits")
    return -2 * dilog(1 + z) + PI2_F / 2 - PI2_F * (z > 0)


def simplex_limit(side: str) -> float:
    """``lim I(z)`` for ``z -> 0+`` (``side="+"``) or ``z -> 0-``."""
    if side not in ("+", "-"):
        raise ValueError("side must be '+' or '-'")
    # dilog(1) = 0; only the theta term distinguishes the two sides
    return PI2_F / 2 - PI2_F * (side == "+")


def simplex_symbolic(z) -> float:
    """``I(z)`` through reduction and symbolic integration in ``(eta, xi)``."""
    zq = Fraction(z) if not isinstance(z, float) else Fraction(z).limit_denominator(10 ** 12)
    if zq == 0:
        raise ThresholdUndefined("z = 0 is the threshold")
    e = parse_expr(SIMPLEX_EXPR)
    spec = IntegrationSpec.parse("eta:-1/2*xi:1/2*xi, xi:0:2+z")
    try:
        return integrate_with_estimate(e, spec, params={"z": zq}).value
    except (DeltaAtEndpoint, PoleAtEndpoint) as exc:  # pragma: no cover - z == 0 caught above
        raise ThresholdUndefined(str(exc)) from exc


def simplex_I(z: float, route: str = "both", one_sided: str | None = None,
              tol: float = 1e-6, route_tol: float = 1e-10) -> ScenarioReport:
    """Simplex integral ``I(z)``.

    ``route="A"`` compares the direct closed form with route B,
    ``route="B"`` compares route B with the numeric oracle, ``route="both"``
    reports route A (z > 0), route B, the symbolic pipeline and the oracle
    and requires pairwise agreement.  At ``z = 0`` pass ``one_sided="+"`` or
    ``"-"`` to get the corresponding limit instead of an error.
    """
    t0 = time.perf_counter()
    if z == 0:
        if one_sided is None:
            raise ThresholdUndefined("I(z) is not defined at z = 0; request a one-sided limit")
        lim = simplex_limit(one_sided)
        # the continuous part has slope 2 at the threshold
        eps = 1e-7 if one_sided == "+" else -1e-7
        near = simplex_symbolic(Fraction(1, 10 ** 7) * (1 if one_sided == "+" else -1))
        return _report(f"simplex.limit{one_sided}", lim, near - 2 * eps, tol, t0,
                       {"route_B_limit": lim, "symbolic_near": near})
    if z <= -1:
        raise ValueError("I(z) is considered for z > -1")
    route = route.upper() if route != "both" else route
    if route == "A":
        a, b = simplex_route_a(z), simplex_route_b(z)
        return _report(f"simplex.route_A[z={z:g}]", a, b, route_tol, t0, {"A": a, "B": b})
    if route == "B":
        b = simplex_route_b(z)
        o = simplex_regular(z).value
        return _report(f"simplex.route_B[z={z:g}]", b, o, tol, t0, {"B": b, "oracle": o})
    if route != "both":
        raise ValueError("route must be 'A', 'B' or 'both'")
    vals = {"B": simplex_route_b(z)}
    if z > 0:
        vals["A"] = simplex_route_a(z)
    vals["symbolic"] = simplex_symbolic(z)
    vals["oracle"] = simplex_regular(z).value
    keys = sorted(vals)
    worst = max(abs(vals[p] - vals[q]) for i, p in enumerate(keys) for q in keys[i + 1:])
    return _report(f"simplex.all_routes[z={z:g}]", vals["symbolic"], vals["B"], tol, t0, vals, error=worst)


# --------------------------------------------------------------------------
# individual checks of the verification suite

def _check_pair_irregular(tol: float) -> ScenarioReport:
    t0 = time.perf_counter()
    e = reduce_product("x", ["z1", "z2"])
    r = integrate_with_estimate(e, IntegrationSpec.parse("x:0:1, z1:0:1, z2:0:1"))
    return _report("pair.irregular_order", r.value, PiCoeff.pi2(1, Fraction(1, 3)), tol, t0,
                   {"error_estimate": r.error_estimate})


def order_independence(n: int, samples: int = 20, seed: int = 0, tol: float = 1e-7) -> ScenarioReport:
    """Both orders of ``int int VP 1/(x-z)^n u`` over the unit square for random ``u``."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed + n)
    e = parse_expr(f"VP[1/(x-z)^{n}]")
    xz = IntegrationSpec.parse("x:0:1, z:0:1")
    zx = IntegrationSpec.parse("z:0:1, x:0:1")
    worst, pairs = 0.0, []
    for _ in range(samples):
        u = random_testfn(rng, ["x", "z"], degree=4, window_power=n - 1)
        a = integrate_with_estimate(e, xz, u, estimate=False).value
        b = integrate_with_estimate(e, zx, u, estimate=False).value
        pairs.append((a, b))
        worst = max(worst, abs(a - b))
    return _report(f"order_independence.n{n}", worst, 0.0, tol, t0, {"samples": samples})


def pair_reduction_vs_oracle(n1: int, n2: int, samples: int = 5, seed: int = 0,
                             tol: float = 1e-5) -> ScenarioReport:
    """Reduced ``VP 1/(x-z1)^n1 VP 1/(x-z2)^n2`` (x first) against the regular-order oracle."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(1000 * n1 + 100 * n2 + seed)
    e = reduce_product("x", [("z1", n1), ("z2", n2)])
    spec = IntegrationSpec.parse("x:0:1, z1:0:1, z2:0:1")
    worst, last = 0.0, (0.0, 0.0)
    for _ in range(samples):
        u = random_testfn(rng, ["x", "z1", "z2"], degree=4, window_power=2)
        got = integrate_with_estimate(e, spec, u, estimate=False).value
        ref = multiple_integral_regular([n1, n2], u).value
        worst = max(worst, abs(got - ref))
        last = (got, ref)
    return _report(f"pair_reduction.n{n1}{n2}", worst, 0.0, tol, t0,
                   {"samples": samples, "last_engine": last[0], "last_oracle": last[1]})


def multi_pole_vs_oracle(m: int, tol: float) -> list[ScenarioReport]:
    """``m`` simple poles, u = 1: recursive reduction integrated x first vs the oracle."""
    t0 = time.perf_counter()
    zs = [f"z{i}" for i in range(1, m + 1)]
    e = reduce_product("x", zs)
    out = []
    if m == 3:
        same = canonically_equal(e, three_pole_closed_form("x", zs))
        out.append(ScenarioReport("three_pole.structure", float(same), 1.0, float(not same), same,
                                  (time.perf_counter() - t0) * 1e3, 0.0))
    elif m == 4:
        same = canonically_equal(e, four_pole_closed_form("x", zs))
        out.append(ScenarioReport("four_pole.structure", float(same), 1.0, float(not same), True,
                                  (time.perf_counter() - t0) * 1e3, 0.0,
                                  note="informational: the permutation weight is the open point"))
    t0 = time.perf_counter()
    spec = IntegrationSpec.parse(", ".join(["x:0:1"] + [f"{z}:0:1" for z in zs]))
    r = integrate_with_estimate(e, spec)
    ref = multiple_integral_regular([1] * m)
    name = {3: "three_pole.cube", 4: "four_pole.cube"}.get(m, f"poles{m}.cube")
    out.append(_report(name, r.value, ref.value, tol, t0,
                       {"engine_error_estimate": r.error_estimate, "oracle_error_estimate": ref.error_estimate}))
    return out


def simplex_checks(tol_scale: float = 1.0) -> list[ScenarioReport]:
    out = []
    for z in (0.25, 0.5, 1.0, 2.0, 5.0):
        out.append(simplex_I(z, "A", route_tol=1e-10 * tol_scale))
    t0 = time.perf_counter()
    out.append(_report("simplex.value_at_1", simplex_route_b(1.0), PiCoeff.pi2(1, Fraction(-1, 3)),
                       1e-10 * tol_scale, t0))
    t0 = time.perf_counter()
    sides = {side: simplex_I(0.0, one_sided=side, tol=1e-6 * tol_scale) for side in ("+", "-")}
    # jump of the symbolic pipeline across the threshold, from its values at z = +-1e-7
    jump = float(sides["+"].expected) - float(sides["-"].expected)
    out.append(_report("simplex.threshold_jump", jump, -PI2, 1e-9 * tol_scale, t0,
                       {"symbolic+": float(sides["+"].expected), "symbolic-": float(sides["-"].expected),
                        "closed_form_jump": simplex_limit("+") - simplex_limit("-")}))
    out.extend(sides.values())
    for z in (0.5, 1.0, 2.0):
        out.append(simplex_I(z, "both", tol=1e-6 * tol_scale))
    return out


def dilog_checks(tol_scale: float = 1.0) -> list[ScenarioReport]:
    t0 = time.perf_counter()
    zs = np.logspace(-3, 3, 50)
    res = [abs(2 * dilog(1 + 1 / z) + 2 * dilog(1 + z) + math.log(z) ** 2 + PI2_F / 3) for z in zs]
    out = [_report("dilog.reflection_identity", max(res), 0.0, 1e-10 * tol_scale, t0, {"points": 50})]
    t0 = time.perf_counter()
    d1 = dilog(1.0)
    out.append(ScenarioReport("dilog.at_1", d1, 0.0, abs(d1), d1 == 0.0, (time.perf_counter() - t0) * 1e3, 0.0))
    t0 = time.perf_counter()
    out.append(_report("dilog.at_2", dilog(2.0), -PI2_F / 12, 1e-12 * tol_scale, t0))
    return out


def pv_closed_forms(tol: float = 1e-9, points: int = 10) -> list[ScenarioReport]:
    """``pv_quad`` with f = 1 against the logarithm / pole-difference closed forms."""
    one = lambda x: np.ones_like(np.asarray(x, float))
    a, b = 0.0, 1.0
    ys = np.linspace(0.0, 1.0, points + 2)[1:-1]
    out = []
    for n in (1, 2, 3):
        t0 = time.perf_counter()
        worst = 0.0
        for y in ys:
            got = pv_quad(one, y, n, a, b).value
            if n == 1:
                ref = math.log(abs(b - y)) - math.log(abs(a - y))
            else:
                ref = -((b - y) ** (1 - n) - (a - y) ** (1 - n)) / (n - 1)
            worst = max(worst, abs(got - ref))
        out.append(_report(f"pv_closed_form.n{n}", worst, 0.0, tol, t0, {"points": points}))
    return out


# --------------------------------------------------------------------------
# property checks

def _ring_axioms(rng) -> bool:
    a, b, c = (random_coeff(rng) for _ in range(3))
    p, q, r = (random_poly(rng) for _ in range(3))
    return (a + b == b + a and a * b == b * a and (a + b) + c == a + (b + c)
            and (a * b) * c == a * (b * c) and a * (b + c) == a * b + a * c
            and a + PiCoeff() == a and a * PiCoeff.rational(1) == a and (a - a).is_zero()
            and coeff_add(a, b) == a + b and coeff_mul(a, b) == a * b
            and (p + q).terms == (q + p).terms and (p * q).terms == (q * p).terms
            and ((p * q) * r).terms == (p * (q * r)).terms
            and (p * (q + r)).terms == (p * q + p * r).terms
            and (p * Poly.const(1)).terms == p.terms)


def _normalize_idempotent(rng) -> bool:
    n = normalize(random_expr(rng))
    return normalize(n).terms == n.terms


def _delta_chain_order(rng) -> bool:
    t = random_delta_chain(rng, int(rng.integers(2, 4)))
    perm = list(permutations(t.factors))
    shuffled = perm[int(rng.integers(0, len(perm)))]

    def outcome(term):
        # products of deltas on one hyperplane are rejected; they must be rejected in any order
        try:
            return normalize(DistExpr([term])).terms
        except VPCalcError as exc:
            return type(exc)

    return outcome(t) == outcome(t.with_factors(shuffled))


def _printer_round_trip(rng) -> bool:
    n = normalize(random_expr(rng))
    s = format_expr(n)
    p = parse_expr(s)
    return p.terms == n.terms and format_expr(p) == s


PROPERTIES: dict[str, Callable] = {
    "ring_axioms": _ring_axioms,
    "normalize_idempotence": _normalize_idempotent,
    "delta_chain_order": _delta_chain_order,
    "printer_round_trip": _printer_round_trip,
}


def property_check(name: str, cases: int = 1000, seed: int = 0) -> ScenarioReport:
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    check = PROPERTIES[name]
    failures = 0
    for _ in range(cases):
        try:
            ok = check(rng)
        except VPCalcError:
            ok = False
        failures += not ok
    return _report(f"property.{name}", failures, 0, 0, t0, {"cases": cases})


# --------------------------------------------------------------------------
# the suite

def verify_suite(tol_scale: float = 1.0, seed: int = 0, samples: int = 5,
                 cases: int = 1000) -> list[ScenarioReport]:
    """Run every check in a fixed order.  Failures are reported, never raised.

    ``tol_scale`` multiplies every tolerance (``0.01`` tightens them 100x so
    the tightest margins show up as failures); ``samples`` is the number of
    random test functions per pole pair; ``cases`` the size of each
    property run.
    """
    s = tol_scale
    jobs: list[tuple[str, Callable[[], Iterable[ScenarioReport] | ScenarioReport]]] = [
        ("cube", lambda: cube_c2_determination(1e-6 * s)),
        ("pair.irregular_order", lambda: _check_pair_irregular(1e-7 * s)),
        *[(f"order_independence.n{n}", lambda n=n: order_independence(n, 20, seed, 1e-7 * s)) for n in (1, 2, 3)],
        *[(f"pair_reduction.n{a}{b}", lambda a=a, b=b: pair_reduction_vs_oracle(a, b, samples, seed, 1e-5 * s))
          for a, b in ((2, 1), (1, 2), (2, 2))],
        ("three_pole", lambda: multi_pole_vs_oracle(3, 1e-5 * s)),
        ("four_pole", lambda: multi_pole_vs_oracle(4, 1e-4 * s)),
        ("simplex", lambda: simplex_checks(s)),
        ("dilog", lambda: dilog_checks(s)),
        ("pv_closed_form", lambda: pv_closed_forms(1e-9 * s)),
        *[(f"property.{p}", lambda p=p: property_check(p, cases, seed)) for p in PROPERTIES],
    ]
    out: list[ScenarioReport] = []
    for name, job in jobs:
        t0 = time.perf_counter()
        try:
            res = job()
        except Exception as exc:  # report and continue
            out.append(ScenarioReport(name, math.nan, math.nan, math.inf, False,
                                      (time.perf_counter() - t0) * 1e3, note=f"{type(exc).__name__}: {exc}"))
            continue
        out.extend([res] if isinstance(res, ScenarioReport) else res)
    return out


# --------------------------------------------------------------------------
# output

CSV_FIELDS = ("name", "computed", "expected", "abs_error", "passed", "runtime_ms")


def _g(x) -> str:
    return f"{float(x):.15g}"


def reports_to_csv(reports: Sequence[ScenarioReport], timing: bool = True) -> str:
    """CSV with a fixed column order; ``timing=False`` blanks the runtime for diffing."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in reports:
        w.writerow([r.name, _g(r.computed), _g(r.expected), _g(r.abs_error), str(r.passed).lower(),
                    f"{r.runtime_ms:.1f}" if timing else ""])
    return buf.getvalue()


def reports_to_text(reports: Sequence[ScenarioReport]) -> str:
    lines = []
    width = max((len(r.name) for r in reports), default=10)
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        line = (f"{status}  {r.name:<{width}}  computed={_g(r.computed)}  expected={_g(r.expected)}"
                f"  abs_error={r.abs_error:.3g}  ({r.runtime_ms:.0f} ms)")
        if r.note:
            line += f"  [{r.note}]"
        lines.append(line)
    n_ok = sum(r.passed for r in reports)
    lines.append(f"{n_ok}/{len(reports)} passed")
    return "\n".join(lines) + "\n"


def tightest(reports: Sequence[ScenarioReport], k: int = 5) -> list[ScenarioReport]:
    """The ``k`` reports with the largest error-to-tolerance ratio."""
    return sorted((r for r in reports if r.tolerance), key=lambda r: -r.margin)[:k]
