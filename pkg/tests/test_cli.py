import csv
import io

import pytest

from vpcalc.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_reduce_prints_pair_formula(capsys):
    code, out, _ = run(capsys, "reduce", "VP[1/(x-z1)]*VP[1/(x-z2)]")
    assert code == 0
    assert out.strip() == ("pi^2*delta(x-z2)*delta(z1-z2) + VP[1/(x-z1)]*VP[1/(z1-z2)]"
                           " - VP[1/(x-z2)]*VP[1/(z1-z2)]")


def test_parse_error_exit_status(capsys):
    code, out, err = run(capsys, "reduce", "VP[1/(x-")
    assert code == 2 and "column 8" in err and out == ""


def test_bad_spec_exit_status(capsys):
    code, _, err = run(capsys, "integrate", "VP[1/(x-z)]", "x:0")
    assert code == 2 and "spec" in err


def test_integrate_prints_estimate(capsys):
    code, out, _ = run(capsys, "integrate", "VP[1/(x-z1)]*VP[1/(x-z2)]", "x:0:1, z1:0:1, z2:0:1")
    value, _, est = out.strip().partition(" +- ")
    assert code == 0 and abs(float(value) - 3.289868133696453) < 1e-9 and float(est) >= 0


def test_integrate_with_parameter(capsys):
    code, out, _ = run(capsys, "integrate", "-1 * VP[1/(eta+1/2*xi-1)] * VP[1/(eta-1/2*xi+1)]",
                       "eta:-1/2*xi:1/2*xi, xi:0:2+z", "--param", "z=1", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["value", "error_estimate"]
    assert abs(float(rows[1][0]) + 3.289868133696453) < 1e-9


def test_integrate_threshold_refused(capsys):
    code, _, err = run(capsys, "integrate", "-1 * VP[1/(eta+1/2*xi-1)] * VP[1/(eta-1/2*xi+1)]",
                       "eta:-1/2*xi:1/2*xi, xi:0:2+z", "--param", "z=0")
    assert code == 1 and "PoleAtEndpoint" in err


@pytest.mark.parametrize("argv,expected", [
    (["quad", "pv", "--pole", "0.5", "--n", "2"], -4.0),
    (["quad", "pv", "--pole", "0.5", "--eps0", "0.05"], 0.0),
    (["quad", "log", "--c", "0"], -1.0),
    (["quad", "dilog", "--z", "2"], -0.8224670334241132),
    (["quad", "simplex", "--z", "1"], -3.289868133696453),
    (["quad", "multiple", "--poles", "1,1"], 3.289868133696453),
])
def test_quad(capsys, argv, expected):
    code, out, _ = run(capsys, *argv)
    assert code == 0 and abs(float(out.split()[0]) - expected) < 1e-9


def test_quad_polynomial_weight(capsys):
    code, out, _ = run(capsys, "quad", "pv", "--pole", "0.3", "--f", "x")
    assert code == 0 and abs(float(out.split()[0]) - 1.2541893581161612) < 1e-9


def test_iz_scan_rows(capsys):
    code, out, _ = run(capsys, "iz_scan", "--min", "-0.9", "--max", "3", "--steps", "40", "--route", "both")
    lines = [l for l in out.splitlines() if not l.startswith("#")]
    rows = list(csv.reader(io.StringIO("\n".join(lines))))
    assert code == 0 and rows[0] == ["z", "I_route_A", "I_route_B", "oracle", "abs_disagreement"]
    skipped = [l for l in out.splitlines() if l.startswith("# z=0 skipped")]
    assert len(rows) - 1 + len(skipped) == 40 and len(skipped) == 1
    for z, a, b, o, dis in rows[1:]:
        assert (a != "") == (float(z) > 0)
        assert float(dis) < 1e-8
    again = run(capsys, "iz_scan", "--min", "-0.9", "--max", "3", "--steps", "40", "--route", "both")[1]
    assert again == out


def test_iz_scan_skips_threshold(capsys):
    code, out, _ = run(capsys, "iz_scan", "--min", "-0.5",
                       "--max", "0.5", "--steps", "3")
    assert code == 0 and "# z=0 skipped" in out
    assert len([l for l in out.splitlines() if not l.startswith("#")]) == 3


def test_iz_scan_rejects_bad_range(capsys):
    assert run(capsys, "iz_scan", "--min", "-1", "--max", "1")[0] == 2
    assert run(capsys, "iz_scan", "--steps", "0")[0] == 2
