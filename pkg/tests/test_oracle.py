import math

import numpy as np
import pytest
from scipy.special import spence

from vpcalc import DomainError, PoleOutsideInterval, dilog, log_quad, multiple_integral_regular, pv_quad
from vpcalc.oracle import simplex_regular, ts_quad


def one(x):
    return np.ones_like(np.asarray(x, float))


def ident(x):
    return np.asarray(x, float)


# --------------------------------------------------------------------------
# principal values

@pytest.mark.parametrize("y", [0.1, 0.5, 0.77])
def test_pv_simple_pole_constant(y):
    r = pv_quad(one, y, 1, 0.0, 1.0)
    exact = math.log(1 - y) - math.log(y)
    assert r.value == pytest.approx(exact, abs=1e-12)
    assert abs(r.value - exact) <= r.error_estimate


def test_pv_symmetric_point_is_zero():
    assert abs(pv_quad(one, 0.5, 1, 0.0, 1.0).value) < 1e-14


def test_pv_double_pole_at_half():
    r = pv_quad(one, 0.5, 2, 0.0, 1.0)
    assert r.value == pytest.approx(-4.0, abs=1e-12)
    assert abs(r.value + 4.0) <= r.error_estimate


@pytest.mark.parametrize("y", [0.2, 0.6, 0.95])
def test_pv_linear_weight(y):
    r = pv_quad(ident, y, 1, 0.0, 1.0)
    exact = 1 + y * math.log((1 - y) / y)
    assert r.value == pytest.approx(exact, abs=1e-9)
    assert abs(r.value - exact) <= r.error_estimate


@pytest.mark.parametrize("f", [np.exp, np.cos, lambda x: x ** 3 - 2 * x])
def test_pv_reflection_is_odd(f):
    y, a, b = 0.3, -0.4, 1.7
    left = pv_quad(f, y, 1, a, b).value
    right = pv_quad(lambda x: f(2 * y - x), y, 1, 2 * y - b, 2 * y - a).value
    assert left == pytest.approx(-right, abs=1e-10)


def test_pv_eps0_schedule_does_not_change_the_value():
    a = pv_quad(np.exp, 0.4, 1, 0.0, 1.0).value
    b = pv_quad(np.exp, 0.4, 1, 0.0, 1.0, eps0=0.01).value
    assert a == pytest.approx(b, abs=1e-10)


def test_pv_pole_outside():
    with pytest.raises(PoleOutsideInterval):
        pv_quad(one, 1.5, 1, 0.0, 1.0)


# --------------------------------------------------------------------------
# log-weighted integrals

def test_log_quad_examples():
    assert log_quad(one, 0.0, 0.0, 1.0).value == pytest.approx(-1.0, abs=1e-12)
    assert log_quad(one, 0.5, 0.0, 1.0).value == pytest.approx(-1 - math.log(2), abs=1e-12)
    assert log_quad(ident, 0.0, 0.0, 1.0).value == pytest.approx(-0.25, abs=1e-12)


def _log_potential(c):
    """int_0^1 ln|x - c| dx, continuous in c."""
    def xlx(t):
        return t * math.log(abs(t)) if t else 0.0
    return xlx(1 - c) + xlx(c) - 1


@pytest.mark.parametrize("end", [0.0, 1.0])
@pytest.mark.parametrize("d", [-1e-4, -1e-6, -1e-9, 0.0, 1e-9, 1e-6, 1e-4])
def test_log_quad_continuous_across_endpoints(end, d):
    c = end + d
    assert log_quad(one, c, 0.0, 1.0).value == pytest.approx(_log_potential(c), abs=1e-8)


def test_log_quad_outside_point():
    exact = ts_quad(lambda x: np.log(np.abs(x - 2.0)), 0.0, 1.0).value
    assert log_quad(one, 2.0, 0.0, 1.0).value == pytest.approx(exact, abs=1e-12)


# --------------------------------------------------------------------------
# dilogarithm (dilog(z) = int_1^z ln t/(1-t) dt = Li2(1-z) = scipy spence(z))

def test_dilog_values():
    assert dilog(1.0) == 0.0
    assert dilog(2.0) == pytest.approx(-math.pi ** 2 / 12, abs=1e-12)


@pytest.mark.parametrize("z", [1e-3, 0.1, 0.5, 0.9, 1.1, 2.0, 10.0, 1e3])
def test_dilog_against_reference(z):
    assert dilog(z) == pytest.approx(float(spence(z)), abs=1e-12)


def test_dilog_against_its_definition():
    z = 3.5
    quad = ts_quad(lambda t: np.log(t) / (1 - t), 1.0, z).value
    assert dilog(z) == pytest.approx(quad, abs=1e-10)


@pytest.mark.parametrize("z", [0.1, 0.5, 1.0, 2.0, 10.0])
def test_reflection_identity(z):
    r = 2 * dilog(1 + 1 / z) + 2 * dilog(1 + z) + math.log(z) ** 2 + math.pi ** 2 / 3
    assert abs(r) < 1e-12


def test_dilog_domain():
    with pytest.raises(DomainError):
        dilog(0.0)
    with pytest.raises(DomainError):
        dilog(-1.0)


# --------------------------------------------------------------------------
# nested integrals

def test_two_simple_poles_regular_order():
    assert multiple_integral_regular([1, 1]).value == pytest.approx(math.pi ** 2 / 3, abs=1e-10)


def test_three_simple_poles_regular_order():
    assert abs(multiple_integral_regular([1, 1, 1]).value) < 1e-9


def test_simplex_oracle_at_one():
    assert simplex_regular(1.0).value == pytest.approx(-math.pi ** 2 / 3, abs=1e-9)


def test_simplex_oracle_below_threshold():
    assert simplex_regular(-0.5).value == pytest.approx(-2 * dilog(0.5) + math.pi ** 2 / 2, abs=1e-9)
