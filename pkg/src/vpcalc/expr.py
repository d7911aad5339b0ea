"""Distributional expressions.

A :class:`DistExpr` is a finite sum of :class:`DistTerm`, each an exact
``PiCoeff`` times a product of factors:

* :class:`Pole`   ``VP 1/L^n`` for an affine form ``L``
* :class:`Log`    ``ln|L|`` (or its ``d``-th distributional derivative)
* :class:`Delta`  ``delta^(k)(L)``
* :class:`Theta`  Heaviside guard ``theta(L)``
* :class:`Mono`   monomial in the variables
* :class:`Smooth` opaque test function evaluated at affine arguments
* :class:`NumericFactor` values produced by numerical sub-integrations

Affine arguments of poles and deltas are scaled so that the coefficient of
their leading variable (first by name) is 1; the scale goes into the term
coefficient.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Mapping, Sequence

import numpy as np

from .algebra import Affine, Poly, format_mono
from .coeff import ONE, ZERO, PiCoeff
from .errors import DeltaNotEvaluable, SingularEvaluation, ThresholdUndefined, VPCalcError
from .testfn import TestFn

SINGULAR_TOL = 1e-12

_RANK = {"delta": 0, "theta": 1, "pole": 2, "log": 3, "mono": 4, "smooth": 5, "numeric": 6}


class Factor:
    kind = ""

    def vars(self) -> set[str]:
        raise NotImplementedError

    def has(self, v: str) -> bool:
        return v in self.vars()

    def key(self):
        raise NotImplementedError

    def __lt__(self, other):
        return self.key() < other.key()


@dataclass(frozen=True, eq=True)
class Pole(Factor):
    arg: Affine
    degree: int = 1
    kind = "pole"

    def vars(self):
        return set(self.arg.vars)

    def key(self):
        return (_RANK["pole"], self.arg.key(), self.degree)


@dataclass(frozen=True, eq=True)
class Delta(Factor):
    arg: Affine
    order: int = 0
    kind = "delta"

    def vars(self):
        return set(self.arg.vars)

    def key(self):
        return (_RANK["delta"], self.arg.key(), self.order)


@dataclass(frozen=True, eq=True)
class Log(Factor):
    arg: Affine
    deriv: int = 0
    kind = "log"

    def vars(self):
        return set(self.arg.vars)

    def key(self):
        return (_RANK["log"], self.arg.key(), self.deriv)


@dataclass(frozen=True, eq=True)
class Theta(Factor):
    arg: Affine
    kind = "theta"

    def vars(self):
        return set(self.arg.vars)

    def key(self):
        return (_RANK["theta"], self.arg.key())


@dataclass(frozen=True, eq=True)
class Mono(Factor):
    mono: tuple
    kind = "mono"

    def vars(self):
        return {v for v, _ in self.mono}

    def exponent(self, v: str) -> int:
        return dict(self.mono).get(v, 0)

    def key(self):
        return (_RANK["mono"], self.mono)


@dataclass(frozen=True, eq=False)
class Smooth(Factor):
    fn: TestFn
    args: tuple
    deriv: tuple
    kind = "smooth"

    def vars(self):
        return {v for a in self.args for v in a.vars}

    def key(self):
        return (_RANK["smooth"], self.fn.name, id(self.fn), tuple(a.key() for a in self.args), self.deriv)

    def __eq__(self, other):
        return isinstance(other, Smooth) and self.fn is other.fn and self.args == other.args \
            and self.deriv == other.deriv

    def __hash__(self):
        return hash((id(self.fn), self.args, self.deriv))

    def evaluate(self, env):
        f = self.fn.derivative(self.deriv) if any(self.deriv) else self.fn
        return f(*[a.evaluate(env) for a in self.args])


_uid = itertools.count()


class NumericFactor(Factor):
    """A factor whose value is computed numerically from its dependencies."""

    kind = "numeric"

    def __init__(self, deps: Iterable[str], label: str = "N"):
        self.deps = tuple(sorted(set(deps)))
        self.label = label
        self.uid = next(_uid)

    def vars(self):
        return set(self.deps)

    def key(self):
        return (_RANK["numeric"], self.label, self.uid)

    def evaluate(self, env: Mapping[str, float]) -> float:
        raise NotImplementedError

    def singular_affines(self) -> list[Affine]:
        """Affine forms whose zero sets may carry singularities of this factor."""
        return []

    def substituted(self, v: str, repl: Affine) -> "NumericFactor":
        from .errors import UnsupportedIntegrand
        raise UnsupportedIntegrand(f"cannot substitute into numeric factor {self!r}")

    def derivative(self, v: str):
        from .errors import UnsupportedIntegrand
        raise UnsupportedIntegrand(f"cannot differentiate numeric factor {self!r}")

    def __repr__(self):
        return f"{self.label}({','.join(self.deps)})"


@dataclass(frozen=True)
class DistTerm:
    coeff: PiCoeff
    factors: tuple = ()

    def vars(self) -> set[str]:
        out: set[str] = set()
        for f in self.factors:
            out |= f.vars()
        return out

    def of_kind(self, kind: str) -> list:
        return [f for f in self.factors if f.kind == kind]

    def with_factors(self, factors, coeff=None) -> "DistTerm":
        return DistTerm(self.coeff if coeff is None else coeff, tuple(factors))


class DistExpr:
    """Immutable sum of terms."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[DistTerm] = ()):
        self.terms = tuple(terms)

    @classmethod
    def term(cls, *factors, coeff=ONE) -> "DistExpr":
        if not isinstance(coeff, PiCoeff):
            coeff = PiCoeff.rational(coeff)
        return cls([DistTerm(coeff, tuple(factors))])

    @classmethod
    def one(cls) -> "DistExpr":
        return cls([DistTerm(ONE, ())])

    @property
    def free_vars(self) -> set[str]:
        out: set[str] = set()
        for t in self.terms:
            out |= t.vars()
        return out

    def __add__(self, other: "DistExpr") -> "DistExpr":
        return DistExpr(self.terms + other.terms)

    def __neg__(self):
        return self.scale(PiCoeff.rational(-1))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, DistExpr):
            return mul_expr(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, c) -> "DistExpr":
        if not isinstance(c, PiCoeff):
            c = PiCoeff.rational(c)
        return DistExpr(DistTerm(t.coeff * c, t.factors) for t in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, DistExpr):
            return NotImplemented
        return structurally_equal(self, other)

    def __hash__(self):
        return hash(self.terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __repr__(self):
        from .dsl import format_expr
        return f"DistExpr({format_expr(self)!r})"

    def __str__(self):
        from .dsl import format_expr
        return format_expr(self)


# --------------------------------------------------------------------------
# constructors

def _A(x) -> Affine:
    if isinstance(x, Affine):
        return x
    if isinstance(x, str):
        return Affine.var(x)
    return Affine(x)


def vp(var, center=0, degree: int = 1) -> DistExpr:
    """``VP 1/(var - center)^degree``."""
    return DistExpr.term(Pole(_A(var) - _A(center), degree))


def vp_arg(arg: Affine, degree: int = 1) -> DistExpr:
    return DistExpr.term(Pole(arg, degree))


def delta(var, center=0, order: int = 0) -> DistExpr:
    return DistExpr.term(Delta(_A(var) - _A(center), order))


def log_abs(var, center=0) -> DistExpr:
    return DistExpr.term(Log(_A(var) - _A(center)))


def theta(arg) -> DistExpr:
    return DistExpr.term(Theta(_A(arg)))


def smooth(fn: TestFn, *args) -> DistExpr:
    args = tuple(_A(a) for a in args)
    if len(args) != fn.arity:
        raise ValueError(f"{fn.name} takes {fn.arity} arguments")
    if getattr(fn, "is_polynomial", False):
        return poly_expr(fn.as_poly(args))
    return DistExpr.term(Smooth(fn, args, (0,) * fn.arity))


def poly_expr(p: Poly, coeff: PiCoeff = ONE) -> DistExpr:
    terms = []
    for m, c in p.terms.items():
        fs = (Mono(m),) if m else ()
        terms.append(DistTerm(coeff * c, fs))
    return DistExpr(terms)


def const(c) -> DistExpr:
    if not isinstance(c, PiCoeff):
        c = PiCoeff.rational(c)
    return DistExpr([DistTerm(c, ())])


# --------------------------------------------------------------------------
# normalization

def _monic(arg: Affine) -> tuple[Affine, Fraction]:
    a = arg.lead_coeff()
    return arg.scale(1 / a), a


def _normalize_factor(f: Factor):
    """Return (rational multiplier, factor or None) with canonical argument.

    A ``None`` factor means the factor reduced to the multiplier.
    """
    if isinstance(f, Pole):
        if f.degree < 1:
            raise ValueError("pole degree must be >= 1")
        if f.arg.is_const():
            if f.arg.const == 0:
                raise SingularEvaluation("pole with identically vanishing argument")
            return f.arg.const ** -f.degree, None
        arg, a = _monic(f.arg)
        return a ** -f.degree, Pole(arg, f.degree)
    if isinstance(f, Delta):
        if f.arg.is_const():
            if f.arg.const == 0:
                raise VPCalcError("delta with identically vanishing argument")
            return Fraction(0), None
        arg, a = _monic(f.arg)
        return a ** -f.order / abs(a), Delta(arg, f.order)
    if isinstance(f, Log):
        if f.arg.is_const():
            c = f.arg.const
            if c == 0:
                raise SingularEvaluation("log with identically vanishing argument")
            if f.deriv == 0 and abs(c) == 1:
                return Fraction(0), None  # ln 1 = 0
            if f.deriv:
                k = f.deriv
                return Fraction((-1) ** (k - 1) * factorial(k - 1)) / c ** k, None
            if c < 0:
                return Fraction(1), Log(-f.arg)
            return Fraction(1), f
        if f.arg.lead_coeff() < 0:
            return Fraction((-1) ** f.deriv), Log(-f.arg, f.deriv)
        return Fraction(1), f
    if isinstance(f, Theta):
        if f.arg.is_const():
            if f.arg.const > 0:
                return Fraction(1), None
            if f.arg.const < 0:
                return Fraction(0), None
            return Fraction(1), f
        return Fraction(1), Theta(f.arg.scale(1 / abs(f.arg.lead_coeff())))
    if isinstance(f, Mono):
        return (Fraction(1), f) if f.mono else (Fraction(1), None)
    return Fraction(1), f


def _merge_factors(factors: Sequence[Factor]):
    """Merge repeated poles (degrees add), monomials and duplicate guards."""
    mult = Fraction(1)
    poles: dict[Affine, int] = {}
    mono: dict[str, int] = {}
    thetas: dict[Affine, Theta] = {}
    rest = []
    for f in factors:
        m, g = _normalize_factor(f)
        mult *= m
        if mult == 0:
            return Fraction(0), ()
        if g is None:
            continue
        if isinstance(g, Pole):
            poles[g.arg] = poles.get(g.arg, 0) + g.degree
        elif isinstance(g, Mono):
            for v, e in g.mono:
                mono[v] = mono.get(v, 0) + e
        elif isinstance(g, Theta):
            thetas[g.arg] = g
        else:
            rest.append(g)
    # theta(L) theta(-L) vanishes almost everywhere
    for arg in list(thetas):
        if -arg in thetas:
            return Fraction(0), ()
    out = rest + [Pole(a, n) for a, n in poles.items()] + list(thetas.values())
    if mono:
        out.append(Mono(tuple(sorted(mono.items()))))
    return mult, tuple(sorted(out, key=lambda f: f.key()))


def _delta_echelon(deltas: list[Delta]) -> list[tuple[Fraction, list[Delta]]]:
    """Bring a delta product to row-echelon form in the fixed variable order.

    Each pivot variable ends up in exactly one delta. Products sharing a
    pivot are rewritten with the Leibniz rule
    ``a(v) delta^(m)(v-c) = sum_j (-1)^j C(m,j) a^(j)(c) delta^(m-j)(v-c)``.
    """
    deltas = sorted(deltas, key=lambda d: d.key())
    assigned: set[int] = set()
    for v in sorted({x for d in deltas for x in d.arg.vars}):
        containing = [i for i, d in enumerate(deltas) if d.arg.has(v)]
        free = [i for i in containing if i not in assigned]
        if not free:
            continue
        if len(containing) == 1:
            assigned.add(free[0])
            continue
        return _leibniz_step(deltas, v, containing, free)
    return [(Fraction(1), deltas)]


def _scaled_in(d: Delta, v: str):
    """Write ``d`` as ``s * delta^(k)(v - c)``; returns (s, c)."""
    a = d.arg.coeff(v)
    c = d.arg.solve_for(v)
    return a ** -d.order / abs(a), c


def _leibniz_step(deltas, v, containing, free):
    def pick_key(i):
        _, c = _scaled_in(deltas[i], v)
        return (deltas[i].order, _Rev((Affine.var(v) - c).key()))

    p_idx = min(free, key=pick_key)
    P = deltas[p_idx]
    sP, c = _scaled_in(P, v)
    m = P.order
    others = [deltas[i] for i in containing if i != p_idx]
    untouched = [d for i, d in enumerate(deltas) if i not in containing]
    betas = [Q.arg.coeff(v) for Q in others]
    out: list[tuple[Fraction, list[Delta]]] = []
    for j in range(m + 1):
        pref = sP * (-1) ** j * comb(m, j)
        for split in _compositions(j, len(others)):
            mult = pref * Fraction(factorial(j))
            new_q = []
            for Q, b, jq in zip(others, betas, split):
                mult *= b ** jq / factorial(jq)
                new_q.append(Delta(Q.arg.subs(v, c), Q.order + jq))
            nd = untouched + new_q + [Delta(Affine.var(v) - c, m - j)]
            mult2, fs = Fraction(1), []
            dead = False
            for d in nd:
                mm, g = _normalize_factor(d)
                if mm == 0:
                    dead = True
                    break
                mult2 *= mm
                fs.append(g)
            if dead:
                continue
            for sub_mult, sub in _delta_echelon(fs):
                out.append((mult * mult2 * sub_mult, sub))
    return out


class _Rev:
    """Reversed ordering wrapper, so that min() picks the largest argument."""

    __slots__ = ("k",)

    def __init__(self, k):
        self.k = k

    def __lt__(self, other):
        return other.k < self.k

    def __eq__(self, other):
        return self.k == other.k


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _normalize_term(t: DistTerm) -> list[DistTerm]:
    mult, fs = _merge_factors(t.factors)
    if mult == 0 or t.coeff.is_zero():
        return []
    deltas = [f for f in fs if isinstance(f, Delta)]
    rest = [f for f in fs if not isinstance(f, Delta)]
    coeff = t.coeff * mult
    if len(deltas) < 2:
        return [DistTerm(coeff, fs)]
    out = []
    for m2, ds in _delta_echelon(deltas):
        if m2 == 0:
            continue
        m3, fs2 = _merge_factors(rest + ds)
        if m3:
            out.append(DistTerm(coeff * (m2 * m3), fs2))
    return out


def _cancel_poles(terms: list[DistTerm]) -> list[DistTerm]:
    """Cancel polynomial cofactors against VP poles: ``L * VP 1/L^n = VP 1/L^(n-1)``."""
    groups: dict[tuple, dict[int, Poly]] = {}
    order = []
    for t in terms:
        skel = tuple(f for f in t.factors if not isinstance(f, Mono))
        monos = [f for f in t.factors if isinstance(f, Mono)]
        m = monos[0].mono if monos else ()
        if skel not in groups:
            groups[skel] = {}
            order.append(skel)
        for k, r in t.coeff.terms.items():
            groups[skel][k] = groups[skel].get(k, Poly()) + Poly({m: r})
    out: list[DistTerm] = []
    changed = False
    for skel in order:
        polys = groups[skel]
        poles = [f for f in skel if isinstance(f, Pole)]
        for k, P in polys.items():
            if P.is_zero():
                continue
            cur_skel = list(skel)
            for pole in poles:
                v = pole.arg.lead()
                root = pole.arg.solve_for(v).to_poly()
                deg = pole.degree
                while deg and P.degree(v) > 0:
                    q = P.divide_linear(v, root)
                    if q is None:
                        break
                    P, deg = q, deg - 1
                    changed = True
                if deg != pole.degree:
                    idx = cur_skel.index(pole)
                    if deg:
                        cur_skel[idx] = Pole(pole.arg, deg)
                    else:
                        del cur_skel[idx]
            for m, r in P.terms.items():
                fs = cur_skel + ([Mono(m)] if m else [])
                out.append(DistTerm(PiCoeff({k: r}), tuple(sorted(fs, key=lambda f: f.key()))))
    return out if changed else terms


def _collect(terms: Iterable[DistTerm]) -> list[DistTerm]:
    acc: dict[tuple, PiCoeff] = {}
    for t in terms:
        acc[t.factors] = acc.get(t.factors, ZERO) + t.coeff
    return [DistTerm(c, fs) for fs, c in acc.items() if not c.is_zero()]


def _sort_terms(terms: list[DistTerm]) -> list[DistTerm]:
    return sorted(terms, key=lambda t: (len(t.factors), [f.key() for f in t.factors],
                                        tuple(t.coeff.terms.items())))


def normalize(e: DistExpr) -> DistExpr:
    """Canonical form: scaled arguments, delta echelon, merged like terms."""
    terms: list[DistTerm] = []
    for t in e.terms:
        terms.extend(_normalize_term(t))
    terms = _collect(terms)
    terms = _cancel_poles(terms)
    terms = _collect(terms)
    return DistExpr(_sort_terms(terms))


def structurally_equal(a: DistExpr, b: DistExpr) -> bool:
    na, nb = normalize(a), normalize(b)
    return len(na.terms) == len(nb.terms) and all(
        x.coeff == y.coeff and x.factors == y.factors for x, y in zip(na.terms, nb.terms))


def mul_expr(a: DistExpr, b: DistExpr) -> DistExpr:
    """Distributed product, normalized. VP products sharing a variable stay in place."""
    out = [DistTerm(s.coeff * t.coeff, s.factors + t.factors) for s in a.terms for t in b.terms]
    return normalize(DistExpr(out))


def add(*exprs: DistExpr) -> DistExpr:
    terms = []
    for e in exprs:
        terms.extend(e.terms)
    return normalize(DistExpr(terms))


# --------------------------------------------------------------------------
# substitution and differentiation

def subs_term(t: DistTerm, v: str, repl: Affine) -> DistExpr:
    """Replace variable ``v`` by an affine form in every factor."""
    fs = []
    poly = None
    for f in t.factors:
        if not f.has(v):
            fs.append(f)
        elif isinstance(f, Pole):
            fs.append(Pole(f.arg.subs(v, repl), f.degree))
        elif isinstance(f, Delta):
            fs.append(Delta(f.arg.subs(v, repl), f.order))
        elif isinstance(f, Log):
            fs.append(Log(f.arg.subs(v, repl), f.deriv))
        elif isinstance(f, Theta):
            fs.append(Theta(f.arg.subs(v, repl)))
        elif isinstance(f, Mono):
            poly = Poly({f.mono: 1}).subs(v, repl)
        elif isinstance(f, Smooth):
            fs.append(Smooth(f.fn, tuple(a.subs(v, repl) for a in f.args), f.deriv))
        elif isinstance(f, NumericFactor):
            fs.append(f.substituted(v, repl))
        else:
            raise TypeError(f)
    if poly is None:
        return DistExpr([DistTerm(t.coeff, tuple(fs))])
    return DistExpr([DistTerm(t.coeff * c, tuple(fs) + ((Mono(m),) if m else ())) for m, c in poly.terms.items()])


def subs(e: DistExpr, v: str, repl) -> DistExpr:
    repl = _A(repl)
    out = []
    for t in e.terms:
        out.extend(subs_term(t, v, repl).terms)
    return normalize(DistExpr(out))


def _diff_factor(f: Factor, v: str) -> list[tuple[Fraction, list[Factor]]]:
    if not f.has(v):
        return []
    if isinstance(f, Pole):
        return [(-f.degree * f.arg.coeff(v), [Pole(f.arg, f.degree + 1)])]
    if isinstance(f, Delta):
        return [(f.arg.coeff(v), [Delta(f.arg, f.order + 1)])]
    if isinstance(f, Log):
        if f.deriv == 0:
            return [(f.arg.coeff(v), [Pole(f.arg, 1)])]
        return [(f.arg.coeff(v), [Log(f.arg, f.deriv + 1)])]
    if isinstance(f, Theta):
        return [(f.arg.coeff(v), [Delta(f.arg, 0)])]
    if isinstance(f, Mono):
        e = f.exponent(v)
        rest = tuple((x, k - 1 if x == v else k) for x, k in f.mono)
        rest = tuple((x, k) for x, k in rest if k)
        return [(Fraction(e), [Mono(rest)] if rest else [])]
    if isinstance(f, Smooth):
        out = []
        for i, a in enumerate(f.args):
            c = a.coeff(v)
            if c:
                d = list(f.deriv)
                d[i] += 1
                out.append((c, [Smooth(f.fn, f.args, tuple(d))]))
        return out
    if isinstance(f, NumericFactor):
        return f.derivative(v)
    raise TypeError(f)


def diff_term(t: DistTerm, v: str) -> DistExpr:
    out = []
    for i, f in enumerate(t.factors):
        for c, repl in _diff_factor(f, v):
            fs = t.factors[:i] + tuple(repl) + t.factors[i + 1:]
            out.append(DistTerm(t.coeff * c, fs))
    return DistExpr(out)


def diff(e: DistExpr, v: str, order: int = 1) -> DistExpr:
    """Distributional partial derivative with respect to ``v``."""
    for _ in range(order):
        out = []
        for t in e.terms:
            out.extend(diff_term(t, v).terms)
        e = normalize(DistExpr(out))
    return e


def expand_log_derivatives(e: DistExpr) -> DistExpr:
    """Replace ``(d/dt)^k ln|t|`` at ``t = L`` by ``(-1)^(k-1) (k-1)! VP 1/L^k``."""
    out = []
    for t in e.terms:
        coeff = t.coeff
        fs = []
        for f in t.factors:
            if isinstance(f, Log) and f.deriv > 0:
                k = f.deriv
                coeff = coeff * ((-1) ** (k - 1) * factorial(k - 1))
                fs.append(Pole(f.arg, k))
            else:
                fs.append(f)
        out.append(DistTerm(coeff, tuple(fs)))
    return normalize(DistExpr(out))


# --------------------------------------------------------------------------
# evaluation

def eval_factor(f: Factor, env: Mapping[str, object], tol: float = SINGULAR_TOL):
    """Vectorised value of one factor; raises on singular points."""
    if isinstance(f, Delta):
        raise DeltaNotEvaluable(f"delta factor {f.arg} cannot be evaluated pointwise")
    if isinstance(f, Pole):
        x = f.arg.evaluate(env)
        if np.any(np.abs(x) <= tol):
            raise SingularEvaluation(f"pole argument {f.arg} vanishes")
        return 1.0 / x ** f.degree
    if isinstance(f, Log):
        x = f.arg.evaluate(env)
        if np.any(np.abs(x) <= tol):
            raise SingularEvaluation(f"log argument {f.arg} vanishes")
        if f.deriv == 0:
            return np.log(np.abs(x))
        k = f.deriv
        return (-1) ** (k - 1) * factorial(k - 1) / x ** k
    if isinstance(f, Theta):
        x = f.arg.evaluate(env)
        if np.any(x == 0):
            raise ThresholdUndefined(f"theta({f.arg}) evaluated at 0")
        return np.where(np.asarray(x) > 0, 1.0, 0.0) if np.ndim(x) else float(x > 0)
    if isinstance(f, Mono):
        acc = 1.0
        for v, e in f.mono:
            acc = acc * env[v] ** e
        return acc
    if isinstance(f, Smooth):
        return f.evaluate(env)
    if isinstance(f, NumericFactor):
        return f.evaluate(env)
    raise TypeError(f)


def evaluate_term(t: DistTerm, env: Mapping[str, object]):
    acc = float(t.coeff)
    for f in t.factors:
        acc = acc * eval_factor(f, env)
    return acc


def evaluate_pointwise(e: DistExpr, assignment: Mapping[str, float]) -> float:
    """Value at a point where no pole or log argument vanishes.

    Poles are ordinary reciprocal powers away from their singular set.
    """
    missing = e.free_vars - set(assignment)
    if missing:
        raise ValueError(f"no value for {sorted(missing)}")
    return float(sum(evaluate_term(t, assignment) for t in e.terms))


def format_factor(f: Factor) -> str:
    from .dsl import format_factor as _ff
    return _ff(f)


__all__ = [
    "Affine", "Poly", "Pole", "Delta", "Log", "Theta", "Mono", "Smooth", "NumericFactor",
    "DistTerm", "DistExpr", "normalize", "mul_expr", "evaluate_pointwise", "diff", "subs",
    "vp", "delta", "log_abs", "theta", "smooth", "poly_expr", "const", "format_mono",
]
