"""Reduction of products of VP poles that share a variable.

A product of poles in one variable is rewritten as a sum of single poles in
that variable with pole/delta coefficients in the remaining variables:

    VP 1/(x-z1) VP 1/(x-z2)
        = VP 1/(z1-z2) [VP 1/(x-z1) - VP 1/(x-z2)] + pi^2 delta(x-z1) delta(x-z2)

The constants in front of the delta terms are the ones that make repeated
integration independent of the integration order.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from math import comb, factorial
from typing import Sequence

from .algebra import Affine
from .coeff import ONE, PI2, PiCoeff
from .errors import IdenticalCenters, SingularEvaluation, VPCalcError
from .expr import (Delta, DistExpr, DistTerm, Pole, _A, diff, mul_expr, normalize, subs)

Center = Affine


def _pole(x: str, c: Affine, n: int = 1) -> Pole:
    return Pole(Affine.var(x) - c, n)


def _delta(x: str, c: Affine, k: int = 0) -> Delta:
    return Delta(Affine.var(x) - c, k)


def _check_centers(x: str, centers: Sequence[Affine]):
    for c in centers:
        if c.has(x):
            raise ValueError(f"pole center {c} depends on the variable {x}")
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            if centers[i] == centers[j]:
                raise IdenticalCenters(f"centers {centers[i]} coincide structurally")


def reduce_pair_simple(x: str, z1, z2) -> DistExpr:
    """``VP 1/(x-z1) * VP 1/(x-z2)`` for the irregular integration order."""
    z1, z2 = _A(z1), _A(z2)
    _check_centers(x, [z1, z2])
    inv = Pole(z1 - z2, 1)
    terms = [
        DistTerm(ONE, (inv, _pole(x, z1))),
        DistTerm(-ONE, (inv, _pole(x, z2))),
        DistTerm(PI2, (_delta(x, z1), _delta(x, z2))),
    ]
    return normalize(DistExpr(terms))


def reduce_pair_general(x: str, z1, n1: int, z2, n2: int, delta_sign: str = "derived") -> DistExpr:
    """``VP 1/(x-z1)^n1 * VP 1/(x-z2)^n2`` for the irregular integration order.

    The delta term is ``s * pi^2/((n1-1)!(n2-1)!) delta^(n1-1)(x-z1) delta^(n2-1)(x-z2)``.
    With ``delta_sign="derived"`` (default) ``s = (-1)^(n1+n2)``, which is what
    differentiating the simple formula ``n1-1`` times in ``z1`` and ``n2-1``
    times in ``z2`` gives, because ``d/dz delta(x-z) = -delta'(x-z)``.
    ``delta_sign="literal"`` uses ``s = 1`` for every degree; it differs from the
    derived form when ``n1 + n2`` is odd and is kept only for comparison.
    """
    z1, z2 = _A(z1), _A(z2)
    if n1 < 1 or n2 < 1:
        raise ValueError("pole degrees must be >= 1")
    _check_centers(x, [z1, z2])
    sign = (-1) ** (n1 + n2) if delta_sign == "derived" else 1
    terms = [DistTerm(PiCoeff.pi2(1, Fraction(sign, factorial(n1 - 1) * factorial(n2 - 1))),
                      (_delta(x, z1, n1 - 1), _delta(x, z2, n2 - 1)))]
    for k in range(n1):
        terms.append(DistTerm(PiCoeff.rational(comb(n2 + k - 1, k) * (-1) ** k),
                              (Pole(z1 - z2, n2 + k), _pole(x, z1, n1 - k))))
    for k in range(n2):
        terms.append(DistTerm(PiCoeff.rational(comb(n1 + k - 1, k) * (-1) ** k),
                              (Pole(z2 - z1, n1 + k), _pole(x, z2, n2 - k))))
    return normalize(DistExpr(terms))


def lift_degrees(x: str, z1: str, n1: int, z2: str, n2: int) -> DistExpr:
    """Degree lifting by differentiation in the centers.

    ``VP 1/(x-z1)^n1 VP 1/(x-z2)^n2 = d^(n1-1)/dz1 d^(n2-1)/dz2 [simple pair] / ((n1-1)!(n2-1)!)``;
    centers must be plain variables.
    """
    e = reduce_pair_simple(x, z1, z2)
    e = diff(e, z1, n1 - 1)
    e = diff(e, z2, n2 - 1)
    return normalize(e.scale(Fraction(1, factorial(n1 - 1) * factorial(n2 - 1))))


def reduce_product(x: str, poles: Sequence[tuple]) -> DistExpr:
    """Reduce ``prod VP 1/(x-c_i)^n_i`` to single poles in ``x``.

    ``poles`` is a list of ``(center, degree)``; a bare center means degree 1.
    The result is the canonical form (see :func:`canonicalize`).
    """
    items = [(p, 1) if not isinstance(p, tuple) else p for p in poles]
    items = [(_A(c), int(n)) for c, n in items]
    if not items:
        raise ValueError("empty pole list")
    _check_centers(x, [c for c, _ in items])
    if len(items) == 1:
        c, n = items[0]
        return DistExpr.term(_pole(x, c, n))
    (c1, n1), (c2, n2) = items[0], items[1]
    acc = reduce_pair_general(x, c1, n1, c2, n2)
    for c, n in items[2:]:
        acc = mul_expr(acc, DistExpr.term(_pole(x, c, n)))
        acc = reduce_in(acc, x)
    return canonicalize(acc)


# --------------------------------------------------------------------------
# canonical form

def _pivots(t: DistTerm) -> dict[str, Delta]:
    """Lead variable of each delta (unique after echelon normalization)."""
    out = {}
    for f in t.factors:
        if isinstance(f, Delta):
            out.setdefault(f.arg.lead(), f)
    return out


def _substitute_delta(t: DistTerm, d: Delta) -> DistExpr:
    """``delta^(j)(v-c) f(v) = sum_i (-1)^i C(j,i) f^(i)(c) delta^(j-i)(v-c)``."""
    v = d.arg.lead()
    c = d.arg.solve_for(v)
    inner = [f for f in t.factors if f is not d and f.has(v)]
    outer = [f for f in t.factors if f is not d and not f.has(v)]
    f = DistExpr([DistTerm(ONE, tuple(inner))])
    out = DistExpr()
    for i in range(d.order + 1):
        fi = diff(f, v, i) if i else f
        fi = _subs_raw(fi, v, c)
        sc = PiCoeff.rational(comb(d.order, i) * (-1) ** i)
        rest = DistExpr([DistTerm(t.coeff * sc, tuple(outer) + (Delta(d.arg, d.order - i),))])
        out = out + _mul_raw(rest, fi)
    return out


def _subs_raw(e: DistExpr, v: str, c: Affine) -> DistExpr:
    try:
        return subs(e, v, c)
    except SingularEvaluation as exc:
        raise VPCalcError(f"pole and delta share the point {v} = {c}; the product is undefined") from exc


def _mul_raw(a: DistExpr, b: DistExpr) -> DistExpr:
    return DistExpr([DistTerm(s.coeff * t.coeff, s.factors + t.factors) for s in a.terms for t in b.terms])


def _poles_by_lead(t: DistTerm) -> dict[str, list[Pole]]:
    out: dict[str, list[Pole]] = {}
    for f in t.factors:
        if isinstance(f, Pole):
            out.setdefault(f.arg.lead(), []).append(f)
    return out


def _reduce_term_in(t: DistTerm, v: str, lead_only: bool = False) -> DistExpr | None:
    if lead_only:
        poles = [f for f in t.factors if isinstance(f, Pole) and f.arg.lead() == v]
    else:
        poles = [f for f in t.factors if isinstance(f, Pole) and f.has(v)]
    if len(poles) < 2:
        return None
    scale = Fraction(1)
    items = []
    for p in poles:
        a = p.arg.coeff(v)
        scale *= a ** -p.degree
        items.append((p.arg.scale(1 / a).solve_for(v), p.degree))
    (c1, n1), (c2, n2) = items[0], items[1]
    red = reduce_pair_general(v, c1, n1, c2, n2)
    rest = [f for f in t.factors if f is not poles[0] and f is not poles[1]]
    return _mul_raw(DistExpr([DistTerm(t.coeff * scale, tuple(rest))]), red)


def reduce_in(e: DistExpr, v: str) -> DistExpr:
    """Reduce every product of two or more poles in ``v`` (any lead variable)."""
    todo = list(normalize(e).terms)
    done: list[DistTerm] = []
    while todo:
        t = todo.pop()
        r = _reduce_term_in(t, v)
        if r is None:
            done.append(t)
        else:
            todo.extend(normalize(r).terms)
    return normalize(DistExpr(done))


def _canon_step(t: DistTerm) -> DistExpr | None:
    piv = _pivots(t)
    for v, d in sorted(piv.items()):
        if any(f is not d and f.has(v) for f in t.factors if not isinstance(f, Delta)):
            return _substitute_delta(t, d)
    for v, ps in sorted(_poles_by_lead(t).items()):
        if len(ps) >= 2:
            return _reduce_term_in(t, v, lead_only=True)
    return None


def canonicalize(e: DistExpr, max_rounds: int = 10000) -> DistExpr:
    """Canonical form for structural comparison of reduced expressions.

    * delta pivots are substituted into every other factor containing the
      pivot variable (Leibniz rule for derivative deltas);
    * every product of poles sharing a lead variable is reduced.
    """
    todo = list(normalize(e).terms)
    done: list[DistTerm] = []
    rounds = 0
    while todo:
        rounds += 1
        if rounds > max_rounds:
            raise VPCalcError("canonicalization did not terminate")
        t = todo.pop()
        r = _canon_step(t)
        if r is None:
            done.append(t)
        else:
            todo.extend(normalize(r).terms)
    return normalize(DistExpr(done))


def canonically_equal(a: DistExpr, b: DistExpr) -> bool:
    return canonicalize(a - b).is_zero()


# --------------------------------------------------------------------------
# closed forms for three and four simple poles

def three_pole_closed_form(x: str, z: Sequence) -> DistExpr:
    """Symmetric closed form for ``VP 1/(x-z1) VP 1/(x-z2) VP 1/(x-z3)``."""
    z = [_A(c) for c in z]
    if len(z) != 3:
        raise ValueError("three centers expected")
    _check_centers(x, z)
    terms = []
    for n in range(3):
        others = [k for k in range(3) if k != n]
        pn = _pole(x, z[n])
        terms.append(DistTerm(ONE, (pn,) + tuple(Pole(z[n] - z[k], 1) for k in others)))
        terms.append(DistTerm(PiCoeff.pi2(1, Fraction(-1, 3)),
                              (pn,) + tuple(Delta(z[n] - z[k]) for k in others)))
        terms.append(DistTerm(PI2, (pn,) + tuple(_delta(x, z[k]) for k in others)))
    return normalize(DistExpr(terms))


def four_pole_closed_form(x: str, z: Sequence, perm_weight: Fraction = Fraction(1, 4)) -> DistExpr:
    """Symmetric closed form for the product of four simple poles.

    The middle term is ``perm_weight * pi^2 * sum_P delta(x-zP1) delta(x-zP2) /
    ((zP1-zP3)(zP2-zP4))`` over all 24 orderings ``P``.  Each distinct summand
    occurs twice in that sum (it is invariant under swapping 1<->2 together
    with 3<->4).  The literal weight 1/4 over all 24 orderings is the one that
    agrees with the recursive reduction; ``perm_weight`` is exposed only so the
    alternatives can be checked.
    """
    z = [_A(c) for c in z]
    if len(z) != 4:
        raise ValueError("four centers expected")
    _check_centers(x, z)
    idx = range(4)
    terms = []
    for n in idx:
        pn = _pole(x, z[n])
        others = [k for k in idx if k != n]
        terms.append(DistTerm(ONE, (pn,) + tuple(Pole(z[n] - z[k], 1) for k in others)))
        for l in others:
            rest = [k for k in others if k != l]
            terms.append(DistTerm(PiCoeff.pi2(1, Fraction(1, 3)),
                                  (pn, Pole(z[l] - z[n], 1)) + tuple(Delta(z[n] - z[k]) for k in rest)))
    for p in permutations(idx):
        a, b, c, d = (z[i] for i in p)
        terms.append(DistTerm(PiCoeff.pi2(1, perm_weight),
                              (_delta(x, a), _delta(x, b), Pole(a - c, 1), Pole(b - d, 1))))
    terms.append(DistTerm(PiCoeff.pi2(2, -1), tuple(_delta(x, c) for c in z)))
    return normalize(DistExpr(terms))
