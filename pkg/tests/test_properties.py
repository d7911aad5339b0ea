"""Property tests: algebraic laws that must hold for arbitrary inputs."""
from itertools import permutations

from hypothesis import given, reject, settings
from hypothesis import strategies as st

from vpcalc import (DistExpr, PiCoeff, Poly, VPCalcError, coeff_to_float, format_coeff, format_expr, normalize,
                    parse_coeff, parse_expr)

from .strategies import coeffs, delta_chains, exprs, polys

MANY = settings(max_examples=1000)


def normalized(e):
    """Normal form, discarding inputs that normalize rejects (deltas sharing a hyperplane)."""
    try:
        return normalize(e)
    except VPCalcError:
        reject()


@MANY
@given(coeffs, coeffs, coeffs)
def test_coeff_ring_axioms(a, b, c):
    assert a + b == b + a and a * b == b * a
    assert (a + b) + c == a + (b + c) and (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + PiCoeff() == a and a * PiCoeff.rational(1) == a and (a - a).is_zero()


@MANY
@given(polys, polys, polys)
def test_poly_ring_axioms(p, q, r):
    assert (p + q).terms == (q + p).terms and (p * q).terms == (q * p).terms
    assert ((p * q) * r).terms == (p * (q * r)).terms
    assert (p * (q + r)).terms == (p * q + p * r).terms
    assert (p * Poly.const(1)).terms == p.terms


@MANY
@given(coeffs, coeffs)
def test_coeff_to_float_is_additive(a, b):
    lhs, rhs = coeff_to_float(a + b), coeff_to_float(a) + coeff_to_float(b)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(coeff_to_float(a)), abs(coeff_to_float(b)))


@MANY
@given(coeffs)
def test_coeff_text_round_trip(c):
    assert parse_coeff(format_coeff(c)) == c


@MANY
@given(exprs)
def test_normalize_is_idempotent(e):
    n = normalized(e)
    assert normalize(n).terms == n.terms


@MANY
@given(exprs)
def test_printer_round_trip(e):
    n = normalized(e)
    s = format_expr(n)
    p = parse_expr(s)
    assert p.terms == n.terms and format_expr(p) == s


def _outcome(term):
    try:
        return normalize(DistExpr([term])).terms
    except VPCalcError as exc:
        return type(exc)


@MANY
@given(delta_chains(), st.data())
def test_delta_chain_order_insensitive(t, data):
    order = data.draw(st.sampled_from(list(permutations(t.factors))))
    assert _outcome(t) == _outcome(t.with_factors(order))
