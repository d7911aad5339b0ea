from fractions import Fraction
from itertools import permutations

import pytest

from vpcalc import (IdenticalCenters, canonicalize, canonically_equal, format_expr, four_pole_closed_form,
                    lift_degrees, mul_expr, parse_expr, reduce_in, reduce_pair_general, reduce_pair_simple,
                    reduce_product, three_pole_closed_form, vp)
from vpcalc.algebra import Affine


def test_simple_pair_formula():
    e = reduce_pair_simple("x", "z1", "z2")
    expected = parse_expr("VP[1/(z1-z2)]*VP[1/(x-z1)] - VP[1/(z1-z2)]*VP[1/(x-z2)]"
                          " + pi^2*delta(x-z1)*delta(x-z2)")
    assert e == expected
    assert format_expr(e) == ("pi^2*delta(x-z2)*delta(z1-z2) + VP[1/(x-z1)]*VP[1/(z1-z2)]"
                              " - VP[1/(x-z2)]*VP[1/(z1-z2)]")


def test_simple_pair_is_symmetric():
    assert reduce_pair_simple("x", "z2", "z1") == reduce_pair_simple("x", "z1", "z2")


def test_identical_centers_rejected():
    with pytest.raises(IdenticalCenters):
        reduce_pair_simple("x", "z", "z")
    with pytest.raises(IdenticalCenters):
        reduce_product("x", ["z1", Affine.var("z1")])


def test_affine_centers():
    e = reduce_pair_simple("eta", Affine(1, {"xi": Fraction(-1, 2)}), Affine(-1, {"xi": Fraction(1, 2)}))
    assert "VP[1/(xi-2)]" in format_expr(e)


def test_general_degree_one_is_simple():
    assert reduce_pair_general("x", "z1", 1, "z2", 1) == reduce_pair_simple("x", "z1", "z2")


@pytest.mark.parametrize("n1,n2", [(2, 1), (1, 2), (2, 2), (3, 1), (3, 2)])
def test_general_pair_matches_center_differentiation(n1, n2):
    assert canonically_equal(reduce_pair_general("x", "z1", n1, "z2", n2), lift_degrees("x", "z1", n1, "z2", n2))


def test_literal_delta_sign_differs_for_odd_total_degree():
    derived = reduce_pair_general("x", "z1", 2, "z2", 1)
    literal = reduce_pair_general("x", "z1", 2, "z2", 1, delta_sign="literal")
    assert not canonically_equal(derived, literal)
    assert canonically_equal(reduce_pair_general("x", "z1", 2, "z2", 2),
                             reduce_pair_general("x", "z1", 2, "z2", 2, delta_sign="literal"))


def test_single_pole_unchanged():
    assert reduce_product("x", ["z1"]) == vp("x", "z1")


def test_three_poles_match_symmetric_form():
    zs = ["z1", "z2", "z3"]
    assert canonically_equal(reduce_product("x", zs), three_pole_closed_form("x", zs))


def test_three_poles_symmetric_under_permutation():
    base = reduce_product("x", ["z1", "z2", "z3"])
    for p in permutations(["z1", "z2", "z3"]):
        assert canonically_equal(reduce_product("x", list(p)), base)


def test_four_poles_match_symmetric_form_with_quarter_weight():
    zs = ["z1", "z2", "z3", "z4"]
    rec = reduce_product("x", zs)
    assert canonically_equal(rec, four_pole_closed_form("x", zs))
    assert not canonically_equal(rec, four_pole_closed_form("x", zs, perm_weight=Fraction(1, 8)))


def test_four_poles_inductive_paths_agree():
    one = reduce_in(mul_expr(three_pole_closed_form("x", ["z1", "z2", "z3"]), vp("x", "z4")), "x")
    two = reduce_in(mul_expr(reduce_pair_simple("x", "z1", "z2"), reduce_pair_simple("x", "z3", "z4")), "x")
    assert canonically_equal(one, two)


@pytest.mark.parametrize("v", ["z1", "z2"])
def test_recursive_invariance(v):
    e = reduce_pair_simple("x", "z1", "z2")
    assert canonically_equal(reduce_in(e, v), e)


def test_canonicalize_is_idempotent():
    e = canonicalize(reduce_product("x", ["z1", "z2", "z3"]))
    assert canonicalize(e) == e
