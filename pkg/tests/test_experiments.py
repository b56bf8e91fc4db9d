import json
from fractions import Fraction as Q

import pytest

from conftest import X3_space, Y_space
from mmkit.core import one_point, scale
from mmkit.distances import box_from_coupling
from mmkit.couplings import Coupling
from mmkit.errors import EpsOutOfRange, ReportMismatch, RTooSmall, SinglePointSpace, ValidationError
from mmkit.experiments import (
    ExperimentReport,
    cell,
    gen_Y_eps,
    gen_Z_eps,
    literal,
    run_limit_formula,
    run_non_urysohn,
    run_scale_recovery,
)
from mmkit.invariants import as_kappa, sep


def test_gen_Y_eps():
    assert gen_Y_eps("3/10").weights == (Q(7, 10), Q(3, 10))
    assert gen_Y_eps("1/2").weights == (Q(1, 2), Q(1, 2))
    for bad in ("1", "0", "-1/2"):
        with pytest.raises(EpsOutOfRange):
            gen_Y_eps(bad)


def test_gen_Z_eps(X3):
    Z = gen_Z_eps(X3, "1/10", 100)
    assert Z.size == 4 and Z.labels[-1] == "z"
    assert Z.weights == (Q(9, 20), Q(9, 40), Q(9, 40), Q(1, 10))
    assert all(Z.dist[3][i] == 100 for i in range(3))
    # natural coupling: the X part onto y0, z onto y1
    pi = Coupling.from_rows([[w, 0] for w in Z.weights[:3]] + [[0, Q(1, 10)]])
    assert box_from_coupling(scale(Z, Q(1, 100)), gen_Y_eps("1/10"), pi) <= Q(3, 100)
    assert gen_Z_eps(X3, "1/10", 3).size == 4
    with pytest.raises(RTooSmall):
        gen_Z_eps(X3, "1/10", "29/10")
    with pytest.raises(EpsOutOfRange):
        gen_Z_eps(X3, 1, 10)
    relabelled = gen_Z_eps(gen_Z_eps(X3, "1/2", 3), "1/2", 3)
    assert relabelled.labels[-2:] == ("z", "z'")


def test_non_urysohn_on_X3(X3):
    report = run_non_urysohn(X3, ["1/10", "1/100"], [10, 100, 1000])
    assert report.passed
    rows = {(r["eps"], r["r"]): r for r in report.rows}
    assert Q(rows[("1/10", "1000")]["box_scaled_Z_Y"]) <= Q(3, 1000)
    assert Q(rows[("1/100", "10")]["box_Z_X"]) <= Q(1, 100)
    with pytest.raises(SinglePointSpace):
        run_non_urysohn(one_point(), ["1/10"], [10])


def test_limit_formula_X3(X3):
    report = run_limit_formula(X3, ["1/4", "1/4"])
    assert report.passed
    assert report.rows[-1]["n"] == "liminf"
    assert Q(report.rows[-1]["sep"]) == 3


def test_limit_formula_Y():
    report = run_limit_formula(Y_space(), ["1/10", "1/10"])
    assert report.passed and Q(report.rows[-1]["sep"]) == 1


def test_limit_formula_constant_sequence(X3):
    kappa = as_kappa(["1/4", "1/4"])
    report = run_limit_formula(X3, kappa, sequence=[X3] * 6, delta_grid=["1/8", "1/16"])
    for row in report.rows[:-2]:
        assert Q(row["sep"]) == sep(X3, kappa.shifted(-Q(row["delta"])))
    assert report.passed


def test_limit_formula_delta_grid_bound(X3):
    from mmkit.errors import PreconditionError
    with pytest.raises(PreconditionError):
        run_limit_formula(X3, ["1/4", "1/4"], delta_grid=["1/4"])
    # small kappa: the default grid adapts
    assert run_limit_formula(X3, ["1/10", "1/10"], eps_schedule=[Q(1, n) for n in range(2, 12)]).passed


def test_limit_formula_mismatch_is_reported(X3):
    # a sequence converging to a different space cannot reproduce Sep(X3)
    report = run_limit_formula(X3, ["1/4", "1/4"], sequence=[scale(X3, 2)] * 4)
    assert not report.passed and report.failures()


@pytest.mark.parametrize("X,t", [(X3_space(), 7), (X3_space(), 1), (Y_space(), Q(1, 3))])
def test_scale_recovery(X, t):
    report = run_scale_recovery(X, t)
    assert report.passed
    assert {row["t_n"] for row in report.rows} == {str(Q(t))}
    assert {row["sep_ratio"] for row in report.rows} == {str(Q(t))}


def test_scale_recovery_single_point():
    with pytest.raises(SinglePointSpace):
        run_scale_recovery(one_point(), 2)


def test_reports_are_deterministic(X3):
    a = run_non_urysohn(X3, ["1/10"], [10, 100]).dumps()
    b = run_non_urysohn(X3, ["1/10"], [10, 100], jobs=2).dumps()
    assert a == b
    assert run_limit_formula(X3, ["1/4", "1/4"]).dumps() == run_limit_formula(X3, ["1/4", "1/4"]).dumps()


def test_reports_recheck_on_load(X3):
    report = run_non_urysohn(X3, ["1/10"], [10])
    doc = json.loads(report.dumps())
    again = ExperimentReport.from_json(doc)
    assert again.dumps() == report.dumps()
    doc["rows"][0]["box_Z_X"] = "1/2"
    with pytest.raises(ReportMismatch):
        ExperimentReport.from_json(doc)
    with pytest.raises(ValidationError):
        ExperimentReport.from_json({"name": "x"})


def test_report_helpers():
    report = ExperimentReport("demo", ["a", "b"])
    k = report.add_row(a=Q(1, 2), b="3")
    report.check("a <= b", cell(k, "a"), "<=", cell(k, "b"))
    report.check("a == 1", cell(k, "a"), "==", literal(1))
    assert report.failures() == ["a == 1"]
    assert report.to_csv() == "a,b\n1/2,3\n"
