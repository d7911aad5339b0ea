"""Acceptance criteria AC1-AC10.

Every test logs exactly one ``ACn PASS/FAIL`` line; the lines are repeated
in the "acceptance criteria" section at the end of the pytest run.
"""
import time

import pytest

from vpcalc import scenarios as S


def _detail(reports):
    return "; ".join(f"{r.name} err={r.abs_error:.3g} tol={r.tolerance:.3g}" for r in reports)


def _check(log, label, reports, extra=""):
    ok = all(r.passed for r in reports)
    log(f"{label} {'PASS' if ok else 'FAIL'}: {_detail(reports)}{extra}")
    failed = [r.name for r in reports if not r.passed]
    assert ok, f"failed: {failed}"


def test_ac1_cube_c2(acceptance_log):
    t0 = time.perf_counter()
    reports = S.cube_c2_determination(tol=1e-6, c2_tol=1e-5)
    elapsed = time.perf_counter() - t0
    assert [r.tolerance for r in reports] == [1e-6, 1e-6, 1e-5]
    _check(acceptance_log, "AC1", reports, f"; runtime={elapsed:.1f}s (budget 30s)")
    assert elapsed < 30


def test_ac2_pair_reduction_defining_property(acceptance_log):
    _check(acceptance_log, "AC2", [S._check_pair_irregular(1e-7)])


def test_ac3_order_independence(acceptance_log):
    t0 = time.perf_counter()
    reports = [S.order_independence(n, samples=20, seed=0, tol=1e-7) for n in (1, 2, 3)]
    elapsed = time.perf_counter() - t0
    _check(acceptance_log, "AC3", reports, f"; runtime={elapsed:.1f}s (budget 60s)")
    assert elapsed < 60


@pytest.mark.slow
def test_ac4_higher_degree_pairs(acceptance_log):
    reports = [S.pair_reduction_vs_oracle(n1, n2, samples=5, tol=1e-5) for n1, n2 in ((2, 1), (1, 2), (2, 2))]
    _check(acceptance_log, "AC4", reports)


def test_ac5_three_poles(acceptance_log):
    reports = S.multi_pole_vs_oracle(3, tol=1e-5)
    assert [r.name for r in reports] == ["three_pole.structure", "three_pole.cube"]
    _check(acceptance_log, "AC5", reports)


@pytest.mark.slow
def test_ac6_four_poles(acceptance_log):
    t0 = time.perf_counter()
    reports = S.multi_pole_vs_oracle(4, tol=1e-4)
    elapsed = time.perf_counter() - t0
    numeric = [r for r in reports if r.name == "four_pole.cube"]
    _check(acceptance_log, "AC6", numeric, f"; runtime={elapsed:.1f}s (budget 600s)")
    assert elapsed < 600


def test_ac7_simplex(acceptance_log):
    reports = S.simplex_checks()
    names = [r.name for r in reports]
    assert "simplex.value_at_1" in names and "simplex.threshold_jump" in names
    assert sum(r.tolerance == 1e-10 for r in reports) == 6
    _check(acceptance_log, "AC7", reports)


def test_ac8_dilog(acceptance_log):
    _check(acceptance_log, "AC8", S.dilog_checks())


def test_ac9_pv_closed_forms(acceptance_log):
    _check(acceptance_log, "AC9", S.pv_closed_forms(tol=1e-9, points=10))


def test_ac10_property_suites(acceptance_log):
    reports = [S.property_check(name, cases=1000, seed=0) for name in
               ("normalize_idempotence", "delta_chain_order", "ring_axioms", "printer_round_trip")]
    _check(acceptance_log, "AC10", reports)
