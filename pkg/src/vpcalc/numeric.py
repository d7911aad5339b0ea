"""Numerical sub-integrals produced by the integration engine.

When a step has no closed form, the integral over the step variable is kept
as an :class:`IntegralBox` factor: a lazily evaluated function of the
remaining variables. Boxes nest; evaluation is vectorised over arrays of
outer-variable values so that a box of boxes costs one broadcast product
per level.

Quadrature is composite Gauss-Legendre on panels graded geometrically
towards every breakpoint (interval ends, log and step-function roots, and
the singular sets of inner boxes), which resolves the integrable
logarithmic endpoint behaviour. Pole centres are *not* breakpoints: a
``VP 1/(v-c)^n`` factor is handled by subtracting the Taylor polynomial of
its cofactor at ``c`` and adding the exact finite-part integral of the
subtracted part, so the node set never depends on where the pole sits.
"""
from __future__ import annotations

from collections import defaultdict
from contextlib import contextmanager
from functools import lru_cache
from math import factorial
from typing import Mapping

import numpy as np

from fractions import Fraction

from .algebra import Affine, Poly
from .errors import DeltaNotEvaluable, ThresholdUndefined, UnsupportedIntegrand
from .expr import (Delta, DistExpr, DistTerm, Factor, Log, Mono, NumericFactor, Pole, Smooth, Theta, diff,
                   normalize, subs)

SIGMA = 0.2
LEVELS = 16
BASE_ORDER = 10
NEAR_FRACTION = 0.002
NEAR_RATIO = 0.01
PI2_FLOAT = float(np.pi) ** 2
_MEMO_LIMIT = 200_000


@lru_cache(maxsize=None)
def graded_rule(order: int):
    """Nodes and weights on [0, 1], geometrically graded towards both ends."""
    half = [0.0] + [0.5 * SIGMA ** k for k in range(LEVELS, 0, -1)] + [0.3, 0.5]
    edges = np.array(half + [1.0 - x for x in reversed(half[:-1])])
    x, w = np.polynomial.legendre.leggauss(order)
    a, b = edges[:-1], edges[1:]
    nodes = (a[:, None] + (b - a)[:, None] * (x + 1) / 2).ravel()
    weights = ((b - a)[:, None] * w / 2).ravel()
    return nodes, weights


_BOOST = [0]


def step_order(step: int) -> int:
    """Even Gauss order per step; distinct orders keep nested node sets disjoint."""
    return BASE_ORDER + 2 * step + _BOOST[0]


@contextmanager
def refined(boost: int = 4):
    """Evaluate boxes with higher-order rules (used for error estimates)."""
    _BOOST[0] += boost
    try:
        yield
    finally:
        _BOOST[0] -= boost


# --------------------------------------------------------------------------
# vectorised evaluation without singularity checks

def eval_np(f: Factor, env: Mapping[str, object]):
    if isinstance(f, Delta):
        raise DeltaNotEvaluable(f"delta factor {f.arg} cannot be evaluated numerically")
    if isinstance(f, Pole):
        return 1.0 / f.arg.evaluate(env) ** f.degree
    if isinstance(f, Log):
        x = f.arg.evaluate(env)
        if f.deriv == 0:
            return np.log(np.abs(x))
        k = f.deriv
        return (-1) ** (k - 1) * factorial(k - 1) / x ** k
    if isinstance(f, Theta):
        x = f.arg.evaluate(env)
        if np.ndim(x) == 0:
            if x == 0:
                raise ThresholdUndefined(f"theta({f.arg}) evaluated at 0")
            return float(x > 0)
        return (np.asarray(x) > 0).astype(float)
    if isinstance(f, Mono):
        acc = 1.0
        for v, e in f.mono:
            acc = acc * env[v] ** e
        return acc
    if isinstance(f, Smooth):
        return f.evaluate(env)
    if isinstance(f, NumericFactor):
        return f.evaluate({d: env[d] for d in f.deps})
    raise TypeError(f)


def poly_eval(terms: list[tuple[dict, float]], env: Mapping[str, object]):
    """Horner evaluation of ``sum c * prod v^e``, outermost in the largest array."""
    if not terms:
        return 0.0
    vs = sorted({v for e, _ in terms for v in e}, key=lambda v: -np.size(env[v]))
    return _horner(terms, vs, env)


def _horner(items, vs, env):
    if not vs:
        return sum(c for _, c in items)
    v, rest = vs[0], vs[1:]
    by: dict[int, list] = defaultdict(list)
    for e, c in items:
        by[e.get(v, 0)].append((e, c))
    top = max(by)
    x = env[v]
    acc = _horner(by[top], rest, env)
    for k in range(top - 1, -1, -1):
        acc = acc * x
        if k in by:
            acc = acc + _horner(by[k], rest, env)
    return acc


def _factor_roots(P: Poly, roots) -> tuple[list[tuple[str, float, int]], Poly]:
    """Split off exact factors ``(v - r)^m`` for constant ``r`` in ``roots``.

    Expanded polynomials that vanish to high order on a face (test-function
    windows) lose all relative accuracy there; the factored form keeps it.
    """
    factors = []
    for v in sorted(P.vars):
        for r in roots:
            m = 0
            root = Poly.const(r)
            while P.degree(v) > 0:
                q = P.divide_linear(v, root)
                if q is None:
                    break
                P, m = q, m + 1
            if m:
                factors.append((v, float(r), m))
    return factors, P


class CompiledSum:
    """A DistExpr grouped as ``sum skeleton * polynomial`` for fast evaluation."""

    def __init__(self, e: DistExpr, roots=(Fraction(0), Fraction(1))):
        groups: dict[tuple, dict] = {}
        for t in e.terms:
            skel = tuple(f for f in t.factors if not isinstance(f, Mono))
            monos = [f for f in t.factors if isinstance(f, Mono)]
            m = monos[0].mono if monos else ()
            for k, r in t.coeff.terms.items():
                d = groups.setdefault((skel, k), {})
                d[m] = d.get(m, 0) + r
        self.groups = []
        for (skel, k), terms in groups.items():
            P = Poly(terms)
            if P.is_zero():
                continue
            lin, Q = _factor_roots(P, roots)
            poly = [(dict(m), float(c)) for m, c in Q.terms.items()]
            self.groups.append((skel, float(PI2_FLOAT ** k), lin, poly))
        self.has_numeric = any(isinstance(f, NumericFactor) for s, *_ in self.groups for f in s)

    def __call__(self, env):
        acc = 0.0
        for skel, scale, lin, poly in self.groups:
            val = poly_eval(poly, env)
            for v, r, m in lin:
                val = val * (env[v] - r) ** m
            for f in skel:
                val = val * eval_np(f, env)
            acc = acc + scale * val
        return acc


def evaluate_expr(e: DistExpr, env: Mapping[str, object] | None = None):
    """Numeric value of an expression whose free variables are all in ``env``."""
    env = dict(env or {})
    missing = e.free_vars - set(env)
    if missing:
        raise ValueError(f"no value for {sorted(missing)}")
    with np.errstate(all="ignore"):
        return CompiledSum(e)(env)


def _fp_power(m: int, lo, hi):
    """Finite-part integral of ``s^m`` over [lo, hi] (lo < 0 < hi allowed)."""
    if m == -1:
        return np.log(np.abs(hi)) - np.log(np.abs(lo))
    return (hi ** (m + 1) - lo ** (m + 1)) / (m + 1)


# --------------------------------------------------------------------------

class IntegralBox(NumericFactor):
    """``int_lower^upper integrand d(var)`` as a function of the outer variables."""

    def __init__(self, var: str, lower: Affine, upper: Affine, integrand: DistExpr, step: int = 0,
                 label: str = "I"):
        if lower.has(var) or upper.has(var):
            raise ValueError("limits may not depend on the integration variable")
        deps = (integrand.free_vars - {var}) | set(lower.vars) | set(upper.vars)
        super().__init__(deps, label)
        self.var = var
        self.lower = lower
        self.upper = upper
        self.integrand = integrand
        self.step = step
        self._compiled = None
        self._memo: dict = {}

    def __repr__(self):
        from .dsl import format_expr
        return f"{self.label}[{self.var}:{self.lower}..{self.upper}]({format_expr(self.integrand)})"

    # -- structure --------------------------------------------------------
    def _compile(self):
        if self._compiled is not None:
            return self._compiled
        v = self.var
        by_pole: dict = {}
        for t in self.integrand.terms:
            poles = [f for f in t.factors if isinstance(f, Pole) and f.has(v)]
            if len(poles) > 1:
                raise UnsupportedIntegrand(f"several poles in {v} inside a numeric integral")
            if any(isinstance(f, Delta) and f.has(v) for f in t.factors):
                raise UnsupportedIntegrand(f"delta in {v} inside a numeric integral")
            key = poles[0] if poles else None
            rest = tuple(f for f in t.factors if f is not key)
            by_pole.setdefault(key, []).append(DistTerm(t.coeff, rest))
        groups = []
        for pole, terms in by_pole.items():
            g = normalize(DistExpr(terms))
            if g.is_zero():
                continue
            entry = {"pole": pole, "g": CompiledSum(g), "expr": g}
            if pole is not None:
                alpha = pole.arg.coeff(v)
                entry["center"] = pole.arg.solve_for(v)
                entry["scale"] = float(alpha) ** -pole.degree
                for f in (f for t in g.terms for f in t.factors):
                    if isinstance(f, (Log, Theta)) and f.has(v) and f.arg.solve_for(v) == entry["center"]:
                        raise UnsupportedIntegrand("pole coincides with a log or step singularity")
                n = pole.degree
                if n >= 2:
                    if entry["g"].has_numeric:
                        entry["derivs"] = None
                    else:
                        entry["derivs"] = [CompiledSum(diff(g, v, j)) for j in range(n + 3)]
            groups.append(entry)
        roots = []
        for t in self.integrand.terms:
            for f in t.factors:
                if isinstance(f, (Log, Theta)) and f.has(v):
                    roots.append(f.arg.solve_for(v))
                elif isinstance(f, NumericFactor):
                    for s in f.singular_affines():
                        if s.has(v):
                            roots.append(s.solve_for(v))
        uniq = []
        for r in roots:
            if r not in uniq and r != self.lower and r != self.upper:
                uniq.append(r)
        self._compiled = (groups, uniq)
        return self._compiled

    def singular_affines(self) -> list[Affine]:
        groups, roots = self._compile()
        pts = [self.lower, self.upper] + roots + [g["center"] for g in groups if g["pole"] is not None]
        out: list[Affine] = []
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                d = pts[i] - pts[j]
                if not d.is_const() and d not in out and -d not in out:
                    out.append(d)
        for t in self.integrand.terms:
            for f in t.factors:
                if isinstance(f, NumericFactor):
                    for s in f.singular_affines():
                        if not s.has(self.var) and s not in out:
                            out.append(s)
        return out

    def substituted(self, w: str, repl: Affine) -> "IntegralBox":
        var = self.var
        integrand = self.integrand
        if repl.has(var):
            fresh = var + "'"
            integrand = subs(integrand, var, Affine.var(fresh))
            var = fresh
        return IntegralBox(var, self.lower.subs(w, repl), self.upper.subs(w, repl),
                           subs(integrand, w, repl), self.step, self.label)

    def derivative(self, w: str):
        """Leibniz rule: differentiate under the integral plus moving-limit terms."""
        out = []
        inner = diff(self.integrand, w)
        if not inner.is_zero():
            out.append((1, [IntegralBox(self.var, self.lower, self.upper, inner, self.step, self.label)]))
        for lim, sign in ((self.upper, 1), (self.lower, -1)):
            c = lim.coeff(w)
            if c:
                for t in subs(self.integrand, self.var, lim).terms:
                    out.append((t.coeff * (sign * c), list(t.factors)))
        return out

    def clear_cache(self):
        self._memo.clear()
        for t in self.integrand.terms:
            for f in t.factors:
                if isinstance(f, IntegralBox):
                    f.clear_cache()

    # -- evaluation -------------------------------------------------------
    def evaluate(self, env: Mapping[str, object]):
        env = {d: np.asarray(env[d], dtype=float) for d in self.deps}
        key = None
        if all(a.size <= _MEMO_LIMIT for a in env.values()):
            key = (_BOOST[0],) + tuple((d, a.shape, hash(a.tobytes())) for d, a in sorted(env.items()))
            if key in self._memo:
                return self._memo[key]
        with np.errstate(all="ignore"):
            val = self._evaluate(env)
        if key is not None:
            self._memo[key] = val
        return val

    def _evaluate(self, env):
        groups, roots = self._compile()
        v = self.var
        lo = np.asarray(self.lower.evaluate(env), dtype=float)
        hi = np.asarray(self.upper.evaluate(env), dtype=float)
        sign = np.where(hi >= lo, 1.0, -1.0)
        lo, hi = np.minimum(lo, hi), np.maximum(lo, hi)
        rvals = [np.clip(np.asarray(r.evaluate(env), dtype=float), lo, hi) for r in roots]
        edges = np.stack(np.broadcast_arrays(lo, *rvals, hi), axis=-1)
        edges = np.sort(edges, axis=-1)
        t, w = graded_rule(step_order(self.step))
        e0, e1 = edges[..., :-1, None], edges[..., 1:, None]
        nodes = e0 + (e1 - e0) * t
        # the innermost graded nodes can round onto a panel end, which may be a log root
        nodes = np.minimum(np.maximum(nodes, np.nextafter(e0, np.inf)), np.nextafter(e1, -np.inf))
        nodes = nodes.reshape(edges.shape[:-1] + (-1,))
        weights = ((e1 - e0) * w).reshape(nodes.shape)
        live = weights != 0
        xenv = {d: a[..., None] for d, a in env.items()}
        xenv[v] = nodes
        lo_, hi_ = lo[..., None], hi[..., None]
        total = 0.0
        for g in groups:
            gv = np.where(live, g["g"](xenv), 0.0)
            pole = g["pole"]
            if pole is None:
                total = total + np.sum(weights * gv, axis=-1)
                continue
            c = np.asarray(g["center"].evaluate(env), dtype=float)[..., None]
            s = nodes - c
            inside = (c > lo_) & (c < hi_)
            n = pole.degree
            if n == 1:
                cenv = dict(xenv)
                cenv[v] = c
                gc = np.where(inside, np.nan_to_num(g["g"](cenv) + 0.0 * c), 0.0)
                body = np.where(np.abs(s) > 1e-14, (gv - gc) / s, 0.0)
                tail = np.where(inside, gc * _fp_power(-1, lo_ - c, hi_ - c), 0.0)
                val = np.sum(weights * body, axis=-1) + tail[..., 0]
            else:
                D = self._taylor(g, xenv, c, n, lo_, hi_, inside, edges)
                poly = sum(D[j] * s ** j for j in range(n))
                body = (gv - np.where(inside, poly, 0.0)) / s ** n
                dist = np.min(np.abs(edges - c), axis=-1, keepdims=True)
                delta = np.minimum(NEAR_FRACTION * (hi_ - lo_), NEAR_RATIO * dist)
                if len(D) > n:
                    near = inside & (np.abs(s) < delta)
                    series = sum(D[j] * s ** (j - n) for j in range(n, len(D)))
                    body = np.where(near, series, body)
                body = np.where(np.abs(s) > 1e-14, body, 0.0)
                tail = sum(D[j] * _fp_power(j - n, lo_ - c, hi_ - c) for j in range(n))
                val = np.sum(weights * body, axis=-1) + np.where(inside, tail, 0.0)[..., 0]
            total = total + g["scale"] * val
        out = sign * total
        return out if np.ndim(out) else float(out)

    def _taylor(self, g, xenv, c, n, lo, hi, inside, edges):
        """Scaled Taylor coefficients ``g^(j)(c)/j!`` (j < n+3 when exact)."""
        cenv = dict(xenv)
        cenv[self.var] = c
        if g["derivs"] is not None:
            return [np.where(inside, np.nan_to_num(d(cenv) + 0.0 * c), 0.0) / factorial(j)
                    for j, d in enumerate(g["derivs"])]
        # cofactor contains nested numeric integrals: central differences
        dist = np.min(np.abs(edges - c), axis=-1, keepdims=True)
        h = np.maximum(np.minimum(1e-2 * (hi - lo), 0.2 * dist), 1e-6)
        out = []
        for j in range(n):
            acc = 0.0
            for i in range(j + 1):
                cenv[self.var] = c + (j / 2 - i) * h
                acc = acc + (-1) ** i * _binom(j, i) * g["g"](cenv)
            out.append(np.where(inside, np.nan_to_num(acc / h ** j), 0.0) / factorial(j))
        return out


def _binom(n, k):
    from math import comb
    return comb(n, k)


class LogIntegralResidual(IntegralBox):
    """``int_a^b ln|v - center| * (d/dv)^n weight dv``, evaluated numerically on demand."""

    def __init__(self, var: str, center: Affine, deriv_order: int, weight: DistExpr, lower: Affine,
                 upper: Affine, step: int = 0):
        self.center = center
        self.deriv_order = deriv_order
        self.weight = weight
        integrand = normalize(DistExpr(
            DistTerm(t.coeff, t.factors + (Log(Affine.var(var) - center),))
            for t in diff(weight, var, deriv_order).terms))
        super().__init__(var, lower, upper, integrand, step, label="R")
