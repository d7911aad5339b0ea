"""Integration of distributional expressions, one variable at a time.

Every step integrates a single variable over an interval with affine limits.
Products of poles in the step variable are reduced first; afterwards each
term is handled by the first rule that applies:

* a delta in the variable fixes it (derivative deltas by parts);
* step-function guards in the variable clip the interval, leaving guards in
  the remaining variables when the clip point is not a constant;
* a pole, a log or a polynomial times a polynomial cofactor integrates in
  closed form; the new poles and logs carry the VP prescription in the
  remaining variables;
* a pole times an opaque smooth cofactor integrates by the finite-limit
  formula with a numerically evaluated log residual;
* anything else becomes a numerical sub-integral (:class:`IntegralBox`).

For a pole of degree ``n`` with cofactor ``u`` the finite-limit formula reads

    int_a^b VP 1/(x-y)^n u(x) dx
        = -1/(n-1)! int_a^b ln|x-y| u^(n)(x) dx
          + 1/(n-1)! [ln|x-y| u^(n-1)(x)]_a^b
          - 1/(n-1)! sum_{k=1}^{n-1} (k-1)! [u^(n-k-1)(x) VP 1/(x-y)^k]_a^b.

The endpoint sum can equally be written through derivatives of the log,
``(d/dy)^k ln|b-y| = (-1)^k ln^(k)|b-y|``, which is the natural form when
the next integration runs over ``y``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Mapping, Sequence

from .algebra import Affine, Poly
from .coeff import ONE, PiCoeff
from .errors import (DeltaAtEndpoint, NotSeparable, PoleAtEndpoint, SingularEvaluation, UnsupportedIntegrand,
                     VPCalcError)
from .expr import (Delta, DistExpr, DistTerm, Log, Mono, NumericFactor, Pole, Smooth, Theta, _A, diff,
                   expand_log_derivatives, normalize, poly_expr, smooth, subs)
from .numeric import IntegralBox, LogIntegralResidual, evaluate_expr
from .reduction import reduce_in
from .testfn import TestFn


# --------------------------------------------------------------------------
# integration spec

@dataclass(frozen=True)
class IntegrationSpec:
    """Ordered integration steps, innermost first.

    Each step is ``(variable, lower, upper)``; limits may only involve
    variables of later steps or free parameters.
    """

    steps: tuple

    def __post_init__(self):
        steps = tuple((v, _A(a), _A(b)) for v, a, b in self.steps)
        object.__setattr__(self, "steps", steps)
        names = [v for v, _, _ in steps]
        if len(set(names)) != len(names):
            raise ValueError("integration variables must be distinct")
        for i, (v, a, b) in enumerate(steps):
            earlier = set(names[: i + 1])
            bad = (set(a.vars) | set(b.vars)) & earlier
            if bad:
                raise ValueError(f"limits of {v} depend on {sorted(bad)}, which are integrated no later")

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _, _ in self.steps)

    @classmethod
    def cube(cls, *variables: str, lower=0, upper=1) -> "IntegrationSpec":
        return cls(tuple((v, lower, upper) for v in variables))

    @classmethod
    def parse(cls, text: str) -> "IntegrationSpec":
        """Parse ``"x:0:1, z1:0:1"`` (innermost first); limits are affine DSL forms."""
        from .dsl import parse_affine
        steps = []
        for chunk in text.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            parts = chunk.split(":")
            if len(parts) != 3:
                raise ValueError(f"bad integration step {chunk!r}; expected var:lower:upper")
            steps.append((parts[0].strip(), parse_affine(parts[1]), parse_affine(parts[2])))
        if not steps:
            raise ValueError("empty integration spec")
        return cls(tuple(steps))

    def substituted(self, params: Mapping[str, Fraction]) -> "IntegrationSpec":
        steps = []
        for v, a, b in self.steps:
            for p, val in params.items():
                a, b = a.subs(p, Affine(val)), b.subs(p, Affine(val))
            steps.append((v, a, b))
        return IntegrationSpec(tuple(steps))


# --------------------------------------------------------------------------
# helpers

def _grouped(e: DistExpr):
    """Terms grouped as (skeleton without monomials, pi^2 power) -> Poly."""
    groups: dict[tuple, Poly] = {}
    order = []
    for t in e.terms:
        skel = tuple(f for f in t.factors if not isinstance(f, Mono))
        monos = [f for f in t.factors if isinstance(f, Mono)]
        m = monos[0].mono if monos else ()
        for k, r in t.coeff.terms.items():
            key = (skel, k)
            if key not in groups:
                groups[key] = {}
                order.append(key)
            groups[key][m] = groups[key].get(m, 0) + r
    return [(skel, k, Poly(groups[(skel, k)])) for skel, k in order]


def _times(factors, P: Poly, coeff: PiCoeff = ONE) -> list[DistTerm]:
    out = []
    for m, r in P.terms.items():
        out.append(DistTerm(coeff * r, tuple(factors) + ((Mono(m),) if m else ())))
    return out


def _aff_poly(a: Affine) -> Poly:
    return a.to_poly()


def _poly_integral(P: Poly, v: str, a: Affine, b: Affine) -> Poly:
    res = Poly()
    for e, c in P.coeffs_in(v).items():
        k = e + 1
        res = res + c * (_aff_poly(b) ** k - _aff_poly(a) ** k) * Fraction(1, k)
    return res


def _shifted(P: Poly, v: str, root: Affine) -> dict[int, Poly]:
    """Coefficients of ``P`` in powers of ``s = v - root``."""
    s = "\x00s"
    Q = P.subs(v, Affine.var(s) + root)
    return Q.coeffs_in(s)


def _log_poly_integral(arg: Affine, P: Poly, v: str, a: Affine, b: Affine) -> list[DistTerm]:
    """``int_a^b ln|arg| P dv`` in closed form (``arg`` affine in ``v``)."""
    alpha = arg.coeff(v)
    rho = arg.solve_for(v)
    out: list[DistTerm] = []
    if abs(alpha) != 1:
        out += _times([Log(Affine(abs(alpha)))], _poly_integral(P, v, a, b))
    coeffs = _shifted(P, v, rho)
    for end, sign in ((b, 1), (a, -1)):
        d = end - rho
        if d.is_const() and d.const == 0:
            continue
        dp = _aff_poly(d)
        log_part, plain = Poly(), Poly()
        for j, pj in coeffs.items():
            pw = dp ** (j + 1)
            log_part = log_part + pj * pw * Fraction(sign, j + 1)
            plain = plain + pj * pw * Fraction(-sign, (j + 1) ** 2)
        out += _times([Log(d)], log_part) + _times([], plain)
    return out


def _check_endpoint(c: Affine, a: Affine, b: Affine, what="pole"):
    for end in (a, b):
        if c == end:
            raise PoleAtEndpoint(f"{what} center {c} coincides with the integration limit")


def _endpoint_terms(center: Affine, n: int, derivs_at, form: str) -> list[DistTerm]:
    """Endpoint part of the finite-limit formula.

    ``derivs_at(end, j)`` returns the j-th derivative of the cofactor at the
    endpoint as a list of DistTerms.
    """
    out: list[DistTerm] = []
    inv = Fraction(1, factorial(n - 1))

    def add(terms, factors, c):
        for t in terms:
            out.append(DistTerm(t.coeff * c, t.factors + tuple(factors)))

    for end, sign in derivs_at.ends:
        d = end - center
        if form == "derivative":
            for k in range(n):
                add(derivs_at(end, n - 1 - k), [Log(d, k)], sign * inv * (-1) ** k)
        else:
            add(derivs_at(end, n - 1), [Log(d)], sign * inv)
            for k in range(1, n):
                add(derivs_at(end, n - k - 1), [Pole(d, k)], -sign * inv * factorial(k - 1))
    return out


class _PolyDerivs:
    def __init__(self, P: Poly, v: str, a: Affine, b: Affine):
        self.P, self.v = P, v
        self.ends = ((b, 1), (a, -1))
        self._cache: dict = {}

    def __call__(self, end: Affine, j: int) -> list[DistTerm]:
        key = (end, j)
        if key not in self._cache:
            self._cache[key] = _times([], self.P.diff(self.v, j).subs(self.v, end))
        return self._cache[key]


class _ExprDerivs:
    def __init__(self, U: DistExpr, v: str, a: Affine, b: Affine):
        self.U, self.v = U, v
        self.ends = ((b, 1), (a, -1))

    def __call__(self, end: Affine, j: int) -> list[DistTerm]:
        return list(subs(diff(self.U, self.v, j), self.v, end).terms)


def _pole_poly_integral(pole: Pole, P: Poly, v: str, a: Affine, b: Affine, form: str) -> list[DistTerm]:
    alpha = pole.arg.coeff(v)
    c = pole.arg.solve_for(v)
    n = pole.degree
    _check_endpoint(c, a, b)
    scale = alpha ** -n
    res = _log_poly_integral(Affine.var(v) - c, P.diff(v, n), v, a, b) if n else []
    out = [DistTerm(t.coeff * (-scale / factorial(n - 1)), t.factors) for t in res]
    for t in _endpoint_terms(c, n, _PolyDerivs(P, v, a, b), form):
        out.append(DistTerm(t.coeff * scale, t.factors))
    return out


def _pole_smooth_integral(pole: Pole, U: DistExpr, v: str, a: Affine, b: Affine, form: str,
                          step: int) -> list[DistTerm]:
    alpha = pole.arg.coeff(v)
    c = pole.arg.solve_for(v)
    n = pole.degree
    _check_endpoint(c, a, b)
    scale = alpha ** -n
    out = []
    resid = LogIntegralResidual(v, c, n, U, a, b, step)
    if not resid.integrand.is_zero():
        out.append(DistTerm(PiCoeff.rational(-scale / factorial(n - 1)), (resid,)))
    for t in _endpoint_terms(c, n, _ExprDerivs(U, v, a, b), form):
        out.append(DistTerm(t.coeff * scale, t.factors))
    return out


def _clip(thetas: Sequence[Theta], v: str, a: Affine, b: Affine):
    """Split ``theta`` guards in ``v`` into sub-intervals with outer guards."""
    pieces = [([], a, b)]
    for th in thetas:
        alpha = th.arg.coeff(v)
        rho = th.arg.solve_for(v)
        new = []
        for guards, lo, hi in pieces:
            if alpha > 0:   # v > rho
                d = rho - lo
                if d.is_const() and d.const <= 0:
                    new.append((guards, lo, hi))
                elif d.is_const():
                    new.append((guards + [Theta(hi - rho)], rho, hi))
                else:
                    new.append((guards + [Theta(hi - rho), Theta(rho - lo)], rho, hi))
                    new.append((guards + [Theta(lo - rho)], lo, hi))
            else:           # v < rho
                d = hi - rho
                if d.is_const() and d.const <= 0:
                    new.append((guards, lo, hi))
                elif d.is_const():
                    new.append((guards + [Theta(rho - lo)], lo, rho))
                else:
                    new.append((guards + [Theta(rho - lo), Theta(hi - rho)], lo, rho))
                    new.append((guards + [Theta(rho - hi)], lo, hi))
        pieces = new
    out = []
    for guards, lo, hi in pieces:
        width = hi - lo
        if width.is_const() and width.const <= 0:
            continue
        if any(g.arg.is_const() and g.arg.const <= 0 for g in guards):
            continue
        out.append(([g for g in guards if not g.arg.is_const()], lo, hi))
    return out


# --------------------------------------------------------------------------
# public single-step operations

def integrate_delta(t: DistTerm | DistExpr, var: str, a, b) -> DistExpr:
    """Integrate terms containing a delta in ``var`` over ``[a, b]``.

    ``int_a^b delta^(k)(v-c) f(v) dv = (-1)^k f^(k)(c) theta(b-c) theta(c-a)
    + sum_{j<k} (-1)^j [delta^(k-1-j)(v-c) f^(j)(v)]_{v=a}^{v=b}``;
    the boundary deltas vanish for test functions that vanish at the limits.
    """
    a, b = _A(a), _A(b)
    terms = t.terms if isinstance(t, DistExpr) else (t,)
    out: list[DistTerm] = []
    for term in terms:
        ds = [f for f in term.factors if isinstance(f, Delta) and f.has(var)]
        if not ds:
            raise ValueError(f"term has no delta in {var}")
        d = min(ds, key=lambda f: (f.order, f.key()))
        alpha = d.arg.coeff(var)
        c = d.arg.solve_for(var)
        k = d.order
        if c == a or c == b:
            raise DeltaAtEndpoint(f"delta support {var} = {c} lies on the integration limit")
        scale = alpha ** -k / abs(alpha)
        rest = DistExpr([DistTerm(term.coeff * scale, tuple(f for f in term.factors if f is not d))])
        try:
            fk = subs(diff(rest, var, k), var, c)
        except SingularEvaluation as exc:
            raise UnsupportedIntegrand(f"pole or log singular at the delta point {var} = {c}") from exc
        guards = [Theta(b - c), Theta(c - a)]
        for s in fk.terms:
            out.append(DistTerm(s.coeff * (-1) ** k, s.factors + tuple(guards)))
        for j in range(k):
            fj = diff(rest, var, j)
            for end, sign in ((b, 1), (a, -1)):
                try:
                    val = subs(fj, var, end)
                except SingularEvaluation as exc:
                    raise UnsupportedIntegrand(f"boundary term singular at {var} = {end}") from exc
                for s in val.terms:
                    out.append(DistTerm(s.coeff * (sign * (-1) ** j), s.factors + (Delta(end - c, k - 1 - j),)))
    return normalize(DistExpr(out))


def _closed_form(rest, P: Poly, v: str, lo: Affine, hi: Affine, form: str, step: int):
    poles = [f for f in rest if isinstance(f, Pole)]
    logs = [f for f in rest if isinstance(f, Log)]
    smooths = [f for f in rest if isinstance(f, Smooth)]
    if any(isinstance(f, NumericFactor) for f in rest) or len(poles) > 1:
        return None
    if not poles and not logs and not smooths:
        return _times([], _poly_integral(P, v, lo, hi))
    if not poles and len(logs) == 1 and logs[0].deriv == 0 and not smooths:
        return _log_poly_integral(logs[0].arg, P, v, lo, hi)
    if len(poles) == 1 and not logs:
        if not smooths:
            return _pole_poly_integral(poles[0], P, v, lo, hi, form)
        U = normalize(DistExpr(_times(smooths, P)))
        return _pole_smooth_integral(poles[0], U, v, lo, hi, form, step)
    return None


def integrate_step(e: DistExpr, var: str, a, b, step: int = 0, form: str = "explicit") -> DistExpr:
    """Integrate ``var`` over ``[a, b]``; the result lives in the remaining variables."""
    a, b = _A(a), _A(b)
    e = reduce_in(expand_log_derivatives(e), var)
    out: list[DistTerm] = []
    boxes: dict[tuple, list[DistTerm]] = {}
    box_order = []
    delta_terms: list[DistTerm] = []
    for skel, k, P in _grouped(e):
        coeff = PiCoeff({k: Fraction(1)})
        if any(isinstance(f, Delta) and f.has(var) for f in skel):
            delta_terms += _times(skel, P, coeff)
            continue
        outer = [f for f in skel if not f.has(var)]
        inner = [f for f in skel if f.has(var)]
        thetas = [f for f in inner if isinstance(f, Theta)]
        rest = [f for f in inner if not isinstance(f, Theta)]
        if not P.vars & {var} and not inner:
            out += _times(outer, P * _aff_poly(b - a), coeff)
            continue
        for guards, lo, hi in _clip(thetas, var, a, b):
            closed = _closed_form(rest, P, var, lo, hi, form, step)
            prefix = tuple(outer) + tuple(guards)
            if closed is not None:
                for t in closed:
                    out.append(DistTerm(t.coeff * coeff, t.factors + prefix))
                continue
            # one box per pole keeps each box's dependencies minimal
            pole = next((f for f in rest if isinstance(f, Pole)), None)
            key = (tuple(sorted(prefix, key=lambda f: f.key())), lo, hi, pole)
            if key not in boxes:
                boxes[key] = []
                box_order.append(key)
            boxes[key] += _times(rest, P, coeff)
    for key in box_order:
        prefix, lo, hi, _ = key
        integrand = normalize(DistExpr(boxes[key]))
        if integrand.is_zero():
            continue
        for p in (f for t in integrand.terms for f in t.factors if isinstance(f, Pole) and f.has(var)):
            _check_endpoint(p.arg.solve_for(var), lo, hi)
        out.append(DistTerm(ONE, prefix + (IntegralBox(var, lo, hi, integrand, step),)))
    if delta_terms:
        out += integrate_delta(DistExpr(delta_terms), var, a, b).terms
    return normalize(DistExpr(out))


def integrate_vp_term(t: DistTerm | DistExpr, var: str, a, b, form: str = "explicit") -> DistExpr:
    """Integrate a term with at most one pole in ``var`` over ``[a, b]``.

    ``form`` selects explicit endpoint poles (``"explicit"``) or log
    derivatives (``"derivative"``) for the endpoint part.
    """
    if form not in ("explicit", "derivative"):
        raise ValueError(f"unknown form {form!r}")
    e = t if isinstance(t, DistExpr) else DistExpr([t])
    for term in e.terms:
        if sum(isinstance(f, Pole) and f.has(var) for f in term.factors) > 1:
            raise ValueError(f"more than one pole in {var}; reduce the product first")
        if any(isinstance(f, Delta) and f.has(var) for f in term.factors):
            raise ValueError(f"delta in {var}; use integrate_delta")
        for f in term.factors:
            if isinstance(f, Smooth) and f.has(var):
                _require_derivatives(f.fn)
    return integrate_step(normalize(e), var, a, b, form=form)


def _require_derivatives(fn: TestFn):
    from .errors import MissingDerivatives
    if not callable(getattr(fn, "derivative", None)):
        raise MissingDerivatives(f"test function {fn.name} provides no derivatives")


def integrate_separable(t: DistTerm | DistExpr, var: str, a, b, phi_var: str) -> DistExpr:
    """``int_a^b VP 1/(x-y)^n u(x) phi(y) dx`` through the log potential.

    Equals ``-phi(y)/(n-1)! (d/dy)^n int_a^b ln|x-y| u(x) dx``; the log
    potential is computed in closed form for polynomial ``u`` and the
    ``y``-derivatives are taken in the distribution sense.
    """
    a, b = _A(a), _A(b)
    if not (a.is_const() and b.is_const()):
        raise NotSeparable("limits must be constant")
    e = t if isinstance(t, DistExpr) else DistExpr([t])
    out = DistExpr()
    for term in normalize(e).terms:
        poles = [f for f in term.factors if isinstance(f, Pole) and f.has(var)]
        if len(poles) != 1 or poles[0].arg.coeff(phi_var) == 0:
            raise NotSeparable(f"expected one pole coupling {var} and {phi_var}")
        pole = poles[0]
        if set(pole.arg.vars) != {var, phi_var}:
            raise NotSeparable("pole must depend on the two variables only")
        others = [f for f in term.factors if f is not pole]
        u_part, phi_part = [], []
        for f in others:
            if f.has(var) and f.has(phi_var):
                if isinstance(f, Mono):
                    u_part.append(Mono(tuple(p for p in f.mono if p[0] != phi_var)))
                    phi_part.append(Mono(tuple(p for p in f.mono if p[0] == phi_var)))
                    continue
                raise NotSeparable(f"factor couples {var} and {phi_var}")
            (u_part if f.has(var) else phi_part).append(f)
        if any(not isinstance(f, Mono) for f in u_part):
            raise NotSeparable("u must be a polynomial in the integration variable")
        n = pole.degree
        alpha = pole.arg.coeff(var)
        c = pole.arg.solve_for(var)       # pole at var = c(phi_var)
        P = Poly.const(1)
        for f in u_part:
            P = P * Poly({f.mono: 1})
        potential = DistExpr(_log_poly_integral(Affine.var(var) - c, P, var, a, b))
        # d/dc = (1/gamma) d/d(phi_var) with gamma = dc/d(phi_var)
        gamma = c.coeff(phi_var)
        deriv = diff(potential, phi_var, n).scale(PiCoeff.rational(
            Fraction(-1) * alpha ** -n / factorial(n - 1) / gamma ** n))
        out = out + deriv * DistExpr([DistTerm(term.coeff, tuple(phi_part))])
    return normalize(out)


# --------------------------------------------------------------------------
# repeated integration

def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _next_vars(spec: IntegrationSpec, i: int) -> set[str]:
    return {v for v, _, _ in spec.steps[i + 1:]}


def integrate_symbolic(e: DistExpr, spec: IntegrationSpec, form: str = "auto") -> DistExpr:
    """Run every step of ``spec``; the result depends only on free parameters."""
    e = normalize(e)
    for i, (v, a, b) in enumerate(spec.steps):
        f = form
        if form == "auto":
            f = "derivative" if _next_vars(spec, i) else "explicit"
        try:
            e = integrate_step(e, v, a, b, step=i, form=f)
        except PoleAtEndpoint as exc:
            raise PoleAtEndpoint(str(exc), i) from exc
        except DeltaAtEndpoint as exc:
            raise DeltaAtEndpoint(str(exc), i) from exc
    return e


def weight_expr(u: TestFn, args: Sequence[str]) -> DistExpr:
    return smooth(u, *args)


@dataclass
class IntegrationResult:
    value: float
    error_estimate: float
    expr: DistExpr


def repeated_integrate(e: DistExpr, spec: IntegrationSpec, u: TestFn | None = None,
                       params: Mapping[str, object] | None = None, u_args: Sequence[str] | None = None,
                       form: str = "auto") -> float:
    """Repeated integral of ``e * u`` following ``spec`` (innermost step first).

    ``u`` receives the integration variables sorted by name unless
    ``u_args`` says otherwise; ``params`` fixes free parameters to exact
    rational values before integrating.
    """
    return integrate_with_estimate(e, spec, u, params, u_args, form, estimate=False).value


def integrate_with_estimate(e: DistExpr, spec: IntegrationSpec, u: TestFn | None = None,
                            params: Mapping[str, object] | None = None, u_args: Sequence[str] | None = None,
                            form: str = "auto", estimate: bool = True) -> IntegrationResult:
    e = normalize(e)
    if u is not None:
        args = list(u_args) if u_args is not None else sorted(spec.variables)
        e = e * weight_expr(u, args)
    if params:
        fr = {p: _as_fraction(v) for p, v in params.items()}
        for p, val in fr.items():
            e = subs(e, p, Affine(val))
        spec = spec.substituted(fr)
    free = e.free_vars - set(spec.variables)
    for _, a, b in spec.steps:
        free |= set(a.vars) | set(b.vars)
    free -= set(spec.variables)
    if free:
        raise ValueError(f"free variables without values: {sorted(free)}")
    res = integrate_symbolic(e, spec, form)
    value = float(evaluate_expr(res))
    err = 0.0
    if estimate and _has_boxes(res):
        from . import numeric
        with numeric.refined():
            value2 = float(evaluate_expr(_fresh_boxes(res)))
        err = abs(value2 - value)
    return IntegrationResult(value, err, res)


def _has_boxes(e: DistExpr) -> bool:
    return any(isinstance(f, NumericFactor) for t in e.terms for f in t.factors)


def _fresh_boxes(e: DistExpr) -> DistExpr:
    """Copy with memo caches cleared (evaluation under a different rule)."""
    for t in e.terms:
        for f in t.factors:
            if isinstance(f, IntegralBox):
                f.clear_cache()
    return e


def integrate_expr(e: DistExpr, spec: IntegrationSpec) -> DistExpr:
    """Symbolic result of the steps, without numerical evaluation."""
    return integrate_symbolic(e, spec)


__all__ = [
    "IntegrationSpec", "IntegrationResult", "LogIntegralResidual", "integrate_step", "integrate_vp_term",
    "integrate_delta", "integrate_separable", "integrate_symbolic", "repeated_integrate",
    "integrate_with_estimate", "VPCalcError",
]
