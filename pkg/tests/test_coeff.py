import math
from fractions import Fraction

import pytest

from vpcalc import PI2, PiCoeff, coeff_add, coeff_mul, coeff_to_float, format_coeff, parse_coeff
from vpcalc.algebra import Affine, Poly


def pi2(r):
    return PiCoeff.pi2(1, Fraction(r))


def test_add_thirds():
    assert coeff_add(pi2(Fraction(1, 3)), pi2(Fraction(2, 3))) == PI2


def test_additive_inverse_is_zero():
    z = coeff_add(PI2, -PI2)
    assert z.is_zero() and z == PiCoeff()


def test_cube_reconstruction_sum():
    s = coeff_add(coeff_add(pi2(Fraction(1, 3)), pi2(Fraction(-2, 3))), PI2)
    assert s == pi2(Fraction(2, 3))


def test_mul_adds_powers():
    assert coeff_mul(PI2, PI2) == PiCoeff.pi2(2)
    assert coeff_mul(PiCoeff.rational(Fraction(1, 2)), PI2) == pi2(Fraction(1, 2))
    assert coeff_mul(PiCoeff.rational(-1), pi2(Fraction(1, 3))) == pi2(Fraction(-1, 3))


def test_to_float():
    assert coeff_to_float(PI2) == pytest.approx(9.869604401089358, rel=1e-15)
    assert coeff_to_float(PiCoeff()) == 0.0
    assert coeff_to_float(pi2(Fraction(1, 3))) == pytest.approx(3.289868133696453, rel=1e-15)


def test_no_zero_entries_stored():
    c = PiCoeff({0: 1, 1: 0, 2: Fraction(0, 3)})
    assert c.terms == {0: Fraction(1)}


def test_rationals_stay_exact_for_large_factorials():
    c = PiCoeff.rational(Fraction(1, math.factorial(30)))
    assert (c * math.factorial(30)) == PiCoeff.rational(1)


@pytest.mark.parametrize("text", ["0", "1/2", "-pi^2", "1/2 - 2/3*pi^2 + 3*pi^4", "7/5*pi^6"])
def test_text_round_trip(text):
    c = parse_coeff(text)
    assert parse_coeff(format_coeff(c)) == c
    assert format_coeff(parse_coeff(format_coeff(c))) == format_coeff(c)


def test_affine_arithmetic():
    a = Affine(1, {"x": 2, "z": -1})
    b = Affine.var("z")
    assert (a + b).coeff("z") == 0 and (a + b).vars == ("x",)
    assert a.scale(Fraction(1, 2)).coeff("x") == 1


def test_poly_divide_linear():
    x = Poly.var("x")
    p = x * (x - 1) * (x - 1)
    q = p.divide_linear("x", Poly.const(1))
    assert q is not None and (q * (x - 1)).terms == p.terms
    assert p.divide_linear("x", Poly.const(2)) is None
