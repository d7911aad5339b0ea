import numpy as np
import pytest

from vpcalc import (PI2, Delta, DeltaNotEvaluable, DistExpr, DistTerm, ParseError, PiCoeff, SingularEvaluation,
                    delta, diff, evaluate_pointwise, format_expr, log_abs, mul_expr, normalize, parse_expr,
                    structurally_equal, subs, vp)
from vpcalc.algebra import Affine


def E(src):
    return parse_expr(src)


# --------------------------------------------------------------------------
# normalize

def test_delta_chain_rule():
    e = normalize(E("delta(x-z1)*delta(x-z2)"))
    assert format_expr(e) == "delta(x-z2)*delta(z1-z2)"


def test_delta_chain_is_order_insensitive():
    a = normalize(E("delta(x-z1)*delta(x-z2)"))
    b = normalize(E("delta(x-z2)*delta(x-z1)"))
    assert a == b


def test_same_center_poles_merge_degrees():
    assert format_expr(E("VP[1/(x-z)]*VP[1/(x-z)]")) == "VP[1/(x-z)^2]"


def test_like_terms_cancel():
    assert E("pi^2*log|x-z| - pi^2*log|x-z|").is_zero()


def test_scaled_arguments_are_made_monic():
    assert format_expr(E("2*delta(2*x-1)")) == "delta(x-1/2)"
    assert format_expr(E("VP[1/(2*x-1)]")) == "1/2*VP[1/(x-1/2)]"
    # delta' is odd
    assert format_expr(E("delta^(1)(-x+1)")) == "-delta^(1)(x-1)"


def test_normalize_idempotent_on_example():
    e = E("VP[1/(x-z1)]*delta(x-z2)*log|y-1| + 1/2*pi^2*x^2*delta(y-z1)*delta(x-y)")
    assert normalize(e).terms == normalize(normalize(e)).terms


# --------------------------------------------------------------------------
# mul_expr

def test_product_of_poles_kept_in_place():
    e = mul_expr(vp("x", "z1"), vp("x", "z2"))
    assert len(e.terms) == 1 and len(e.terms[0].factors) == 2


def test_multiplying_by_one():
    e = E("VP[1/(x-z1)] + 3*log|x|")
    assert mul_expr(e, DistExpr.one()) == e


def test_pole_times_delta():
    e = mul_expr(vp("x", "z1"), delta("x", "z2"))
    assert format_expr(e) == "delta(x-z2)*VP[1/(x-z1)]"


# --------------------------------------------------------------------------
# pointwise evaluation

def test_evaluate_pointwise():
    assert evaluate_pointwise(vp("x", 1), {"x": 3.0}) == 0.5
    assert evaluate_pointwise(log_abs("x", "y"), {"x": 1.0, "y": 0.0}) == 0.0


def test_evaluate_pointwise_errors():
    with pytest.raises(SingularEvaluation):
        evaluate_pointwise(vp("x", 1), {"x": 1.0})
    with pytest.raises(DeltaNotEvaluable):
        evaluate_pointwise(delta("x", 1), {"x": 2.0})


def test_evaluate_product_is_product_of_values():
    a, b = E("VP[1/(x-z)^2] + log|x|"), E("VP[1/(x-y)]*x")
    env = {"x": 0.3, "y": 1.7, "z": -0.4}
    assert evaluate_pointwise(mul_expr(a, b), env) == pytest.approx(
        evaluate_pointwise(a, env) * evaluate_pointwise(b, env), rel=1e-12)


# --------------------------------------------------------------------------
# calculus

def test_center_derivative_raises_pole_degree():
    assert diff(vp("x", "z"), "z") == E("VP[1/(x-z)^2]")
    assert diff(delta("x", "z"), "z") == E("-1*delta^(1)(x-z)")


def test_substitution():
    assert subs(E("VP[1/(x-z)]"), "z", Affine(1)) == E("VP[1/(x-1)]")


# --------------------------------------------------------------------------
# DSL

@pytest.mark.parametrize("src", [
    "VP[1/(x-z1)] * VP[1/(x-z2)]",
    "pi^2 * delta(x-z1)*delta(x-z2)",
    "VP[1/(x-z)^3] - 1/3*pi^4*log|x-1/2*y+2|",
    "delta^(2)(x-z)*x^2*y",
])
def test_printer_round_trip(src):
    e = E(src)
    s = format_expr(e)
    assert E(s) == e and format_expr(E(s)) == s


def test_two_pole_product_parses():
    t = E("VP[1/(x-z1)] * VP[1/(x-z2)]").terms[0]
    assert [f.kind for f in t.factors] == ["pole", "pole"]


def test_delta_chain_coefficient():
    t = E("pi^2 * delta(x-z1)*delta(x-z2)").terms[0]
    assert t.coeff == PI2 and all(isinstance(f, Delta) for f in t.factors)


def test_parse_error_position():
    with pytest.raises(ParseError) as info:
        E("VP[1/(x-")
    assert info.value.column == 8
    assert info.value.line == 1


@pytest.mark.parametrize("src", ["", "VP[2/(x)]", "VP[1/(x)]^", "pi^3", "delta(x-z"])
def test_parse_errors(src):
    with pytest.raises(ParseError):
        E(src)
