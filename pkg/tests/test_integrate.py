import math
from fractions import Fraction

import numpy as np
import pytest

from vpcalc import (Affine, DeltaAtEndpoint, DistExpr, IntegrationSpec, NotSeparable, PoleAtEndpoint, Poly,
                    PolyTestFn, TestFn, delta, format_expr, integrate_delta, integrate_separable, integrate_step,
                    integrate_symbolic, integrate_vp_term, integrate_with_estimate, multiple_integral_regular,
                    parse_affine, parse_expr, reduce_product, repeated_integrate, smooth, vp)
from vpcalc.testfn import random_testfn

S = IntegrationSpec.parse
PROBE = PolyTestFn(Poly({(("y", 2),): 1, (("y", 3),): -1, (): Fraction(1, 3)}), ["y"])


def against_probe(e, lo="-1/2", hi="3/2"):
    """Integrate an expression in ``y`` against a fixed polynomial probe."""
    return integrate_with_estimate(e * smooth(PROBE, "y"), S(f"y:{lo}:{hi}"), estimate=False).value


# --------------------------------------------------------------------------
# single pole with finite limits

def test_simple_pole_constant_weight():
    assert format_expr(integrate_vp_term(vp("x", "y"), "x", 0, 1)) == "log|y-1| - log|y|"
    assert integrate_vp_term(vp("x", "y"), "x", "a", "b") == parse_expr("log|b-y| - log|a-y|")


def test_double_pole_constant_weight():
    assert integrate_vp_term(vp("x", "y", 2), "x", "a", "b") == parse_expr("-1*VP[1/(b-y)] + VP[1/(a-y)]")


def test_variable_upper_limit():
    out = integrate_vp_term(vp("x", 1), "x", 0, parse_affine("2+z"))
    assert format_expr(out) == "log|z+1|"


def test_pole_at_endpoint_rejected():
    with pytest.raises(PoleAtEndpoint):
        integrate_vp_term(vp("x", "y"), "x", "y", 1)


def test_step_index_attached_to_endpoint_errors():
    e = parse_expr("-1 * VP[1/(eta+1/2*xi-1)] * VP[1/(eta-1/2*xi+1)]")
    with pytest.raises(PoleAtEndpoint) as info:
        integrate_with_estimate(e, S("eta:-1/2*xi:1/2*xi, xi:0:2+z"), params={"z": 0})
    assert "step 1" in str(info.value)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_endpoint_forms_agree(n):
    vals = [against_probe(integrate_step(vp("x", "y", n), "x", Affine(0), Affine(1), form=f))
            for f in ("explicit", "derivative")]
    assert vals[0] == pytest.approx(vals[1], abs=1e-8)


def test_pole_times_polynomial_against_hand_result():
    # int_0^1 x/(x-y) dx = 1 + y ln((1-y)/y)
    out = integrate_vp_term(parse_expr("VP[1/(x-y)]*x"), "x", 0, 1)
    for y in (0.2, 0.5, 0.9):
        val = integrate_with_estimate(out, S("q:0:1"), params={"y": Fraction(y).limit_denominator()},
                                      estimate=False).value
        assert val == pytest.approx(1 + y * math.log((1 - y) / y), abs=1e-12)


# --------------------------------------------------------------------------
# separable weights

def test_separable_simple_pole():
    assert format_expr(integrate_separable(vp("x", "y"), "x", 0, 1, "y")) == "log|y-1| - log|y|"


def test_separable_factor_passes_through():
    out = integrate_separable(parse_expr("y*VP[1/(x-y)]"), "x", 0, 1, "y")
    assert out == parse_expr("y*log|y-1| - y*log|y|")


def test_separable_double_pole_matches_general_route():
    sep = integrate_separable(vp("x", "y", 2), "x", 0, 1, "y")
    gen = integrate_vp_term(vp("x", "y", 2), "x", 0, 1)
    assert against_probe(sep) == pytest.approx(against_probe(gen), abs=1e-8)


def test_separable_rejects_coupled_weight():
    with pytest.raises(NotSeparable):
        integrate_separable(parse_expr("VP[1/(x-y)]*log|x+y|"), "x", 0, 1, "y")


# --------------------------------------------------------------------------
# deltas

def test_delta_inside_gives_guard():
    assert format_expr(integrate_delta(delta("x", "z"), "x", 0, 1)) == "theta(-z+1)*theta(z)"


def test_delta_derivative_inside():
    out = integrate_delta(parse_expr("delta^(1)(x-z)*x"), "x", 0, 1)
    # -1 inside (0, 1) plus the boundary delta at z = 1
    assert out == parse_expr("delta(z-1) - theta(1-z)*theta(z)")


def test_delta_delta_on_simplex():
    e = parse_expr("pi^2*delta(xi-2)*delta(eta)")
    assert format_expr(integrate_symbolic(e, S("eta:-1/2*xi:1/2*xi, xi:0:2+z"))) == "pi^2*theta(z)"


def test_delta_at_endpoint_rejected():
    with pytest.raises(DeltaAtEndpoint):
        integrate_delta(delta("x", "z"), "x", "z", 1)


def test_guard_matches_clipped_domain():
    # int_{-1}^{2} dz theta-guarded z^2 = int_0^1 z^2 dz
    val = repeated_integrate(parse_expr("delta(x-z)*x^2"), S("x:0:1, z:-1:2"))
    assert val == pytest.approx(1 / 3, abs=1e-12)


# --------------------------------------------------------------------------
# repeated integration

def test_regular_order_two_poles():
    assert repeated_integrate(vp("x", "z1") * vp("x", "z2"), S("z1:0:1, z2:0:1, x:0:1")) == \
        pytest.approx(math.pi ** 2 / 3, abs=1e-10)


def test_irregular_order_two_poles():
    assert repeated_integrate(reduce_product("x", ["z1", "z2"]), S("x:0:1, z1:0:1, z2:0:1")) == \
        pytest.approx(math.pi ** 2 / 3, abs=1e-10)


def test_both_orders_with_polynomial_weight():
    u = PolyTestFn(Poly({(("x", 2),): 1}), ["x", "z"])
    a = repeated_integrate(vp("x", "z"), S("x:0:1, z:0:1"), u)
    b = repeated_integrate(vp("x", "z"), S("z:0:1, x:0:1"), u)
    assert a == pytest.approx(0.5, abs=1e-12) and b == pytest.approx(a, abs=1e-8)


def test_linearity():
    e1, e2 = vp("x", "z"), parse_expr("VP[1/(x-z)^2]*x^2*z^2")
    u = random_testfn(np.random.default_rng(3), ["x", "z"], window_power=1)
    spec = S("x:0:1, z:0:1")
    lhs = repeated_integrate(e1.scale(2) + e2.scale(-3), spec, u)
    rhs = 2 * repeated_integrate(e1, spec, u) - 3 * repeated_integrate(e2, spec, u)
    assert lhs == pytest.approx(rhs, abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_order_independence_random_weights(n):
    rng = np.random.default_rng(100 + n)
    e = vp("x", "z", n)
    for _ in range(3):
        u = random_testfn(rng, ["x", "z"], degree=4, window_power=n - 1)
        a = repeated_integrate(e, S("x:0:1, z:0:1"), u)
        b = repeated_integrate(e, S("z:0:1, x:0:1"), u)
        assert a == pytest.approx(b, abs=1e-7)


def test_opaque_weight_both_orders():
    u = TestFn(lambda x, z: np.exp(x) * np.sin(2 * z) * (x * (1 - x) * z * (1 - z)) ** 2, 2,
               support=[(0, 1), (0, 1)])
    a = integrate_with_estimate(vp("x", "z"), S("x:0:1, z:0:1"), u)
    b = integrate_with_estimate(vp("x", "z"), S("z:0:1, x:0:1"), u)
    assert a.value == pytest.approx(b.value, abs=1e-10)


def test_opaque_weight_double_pole_interior():
    u = TestFn(lambda x, z: np.cos(x + z) * (x * (1 - x)) ** 2, 2, support=[(0, 1), (0, 1)])
    a = repeated_integrate(vp("x", "z", 2), S("x:0:1, z:1/5:4/5"), u)
    b = repeated_integrate(vp("x", "z", 2), S("z:1/5:4/5, x:0:1"), u)
    assert a == pytest.approx(b, abs=1e-8)


def test_pair_with_weight_against_oracle():
    u = random_testfn(np.random.default_rng(7), ["x", "z1", "z2"], degree=3, window_power=1)
    got = repeated_integrate(reduce_product("x", ["z1", "z2"]), S("x:0:1, z1:0:1, z2:0:1"), u)
    assert got == pytest.approx(multiple_integral_regular([1, 1], u).value, abs=1e-6)


def test_error_estimate_reported_for_numeric_parts():
    res = integrate_with_estimate(reduce_product("x", ["z1", "z2", "z3"]), S("x:0:1, z1:0:1, z2:0:1, z3:0:1"))
    assert abs(res.value) < 1e-9 and res.error_estimate < 1e-9


def test_spec_validation():
    with pytest.raises(ValueError):
        S("x:0:z, z:0:x")
    with pytest.raises(ValueError):
        S("x:0")
    with pytest.raises(ValueError):
        repeated_integrate(vp("x", "z"), S("x:0:1"))


def test_unreduced_product_is_reduced_automatically():
    a = repeated_integrate(vp("x", "z1") * vp("x", "z2"), S("x:0:1, z1:0:1, z2:0:1"))
    assert a == pytest.approx(math.pi ** 2 / 3, abs=1e-10)
