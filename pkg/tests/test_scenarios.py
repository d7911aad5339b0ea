import math

import pytest

from vpcalc import ThresholdUndefined
from vpcalc import scenarios as S


@pytest.mark.parametrize("z", [0.25, 0.5, 1.0, 2.0, 5.0])
def test_routes_agree_above_threshold(z):
    r = S.simplex_I(z, "A")
    assert r.passed and r.abs_error < 1e-10


def test_value_at_one():
    assert S.simplex_route_b(1.0) == pytest.approx(-math.pi ** 2 / 3, abs=1e-12)


def test_route_b_below_threshold():
    from vpcalc import dilog
    assert S.simplex_route_b(-0.5) == pytest.approx(-2 * dilog(0.5) + math.pi ** 2 / 2, abs=1e-12)
    with pytest.raises(ValueError):
        S.simplex_route_a(-0.5)


def test_threshold_is_refused():
    for f in (S.simplex_route_a, S.simplex_route_b, S.simplex_symbolic):
        with pytest.raises(ThresholdUndefined):
            f(0.0)
    with pytest.raises(ThresholdUndefined):
        S.simplex_I(0.0)


def test_one_sided_limits_jump_by_pi_squared():
    plus, minus = S.simplex_I(0.0, one_sided="+"), S.simplex_I(0.0, one_sided="-")
    assert plus.passed and minus.passed
    assert plus.computed - minus.computed == pytest.approx(-math.pi ** 2, abs=1e-12)


def test_delta_delta_contribution_is_theta():
    # the jump comes entirely from the theta term: the continuous part matches on both sides
    eps = 1e-9
    cont = lambda z: S.simplex_route_b(z) + math.pi ** 2 * (z > 0)
    assert cont(eps) == pytest.approx(cont(-eps), abs=1e-8)


@pytest.mark.parametrize("z", [0.5, 1.0, 2.0, -0.5])
def test_all_routes(z):
    r = S.simplex_I(z, "both")
    assert r.passed, r.values
    assert ("A" in r.values) == (z > 0)


def test_route_b_against_oracle():
    assert S.simplex_I(-0.3, "B").passed


def test_report_margin_and_csv():
    reports = S.dilog_checks() + S.pv_closed_forms()
    assert all(r.passed for r in reports)
    csv_text = S.reports_to_csv(reports, timing=False)
    assert csv_text.splitlines()[0] == "name,computed,expected,abs_error,passed,runtime_ms"
    assert csv_text == S.reports_to_csv(S.dilog_checks() + S.pv_closed_forms(), timing=False)
    assert "passed" in S.reports_to_text(reports)
    assert all(0 <= r.margin <= 1 for r in reports if r.tolerance)


def test_tightened_tolerances_report_failures():
    loose = S.pv_closed_forms(tol=1e-9)
    tight = S.pv_closed_forms(tol=1e-17)
    assert all(r.passed for r in loose) and not all(r.passed for r in tight)
    assert S.tightest(tight, 1)[0].margin >= 1


def test_property_checks_small_runs():
    for name in S.PROPERTIES:
        assert S.property_check(name, cases=50, seed=1).passed


def test_suite_names_are_stable():
    a = [r.name for r in S.dilog_checks() + S.simplex_checks()]
    b = [r.name for r in S.dilog_checks() + S.simplex_checks()]
    assert a == b and len(set(a)) == len(a)
