"""
Tests for the named verification suites
"""

import pytest

from hochschild.exactla import CoeffRing
from hochschild.ghstructure import CohClass, ClassSymbol
from hochschild.verifier import (
    SUITES,
    CheckRecord,
    VerifyReport,
    _run_task,
    check_cup_certificates,
    check_e2_structure,
    jsonable,
    run_suite,
    run_suites,
    suite_tasks,
)


def _boom():
    raise ArithmeticError("no")


class TestTasks:
    """Task lists and single-check execution"""

    def test_every_suite_has_tasks(self):
        for suite in SUITES:
            assert suite_tasks(suite), suite

    def test_unknown_suite(self):
        with pytest.raises(ValueError):
            suite_tasks("everything")

    def test_m_restricts_tasks(self):
        names = [name for name, _, _ in suite_tasks("tangent", 4)]
        assert names == ["tangent/m=4", "tangent/normalizer_char2/m=2"]

    def test_run_task_statuses(self):
        assert _run_task(("same", lambda: (1, 1), ())).status == "pass"
        assert _run_task(("diff", lambda: (1, 2), ())).status == "fail"
        record = _run_task(("boom", _boom, ()))
        assert record.status == "error"
        assert record.details == "ArithmeticError: no"

    def test_jsonable(self):
        value = {ClassSymbol.d(()): CohClass.of(3, ClassSymbol.a(1, (1,)), 2), "ring": CoeffRing.rationals()}
        assert jsonable(value) == {"d([])": "2*a(1,[1])", "ring": "Q"}


class TestReports:
    """Suite reports"""

    def test_record_dict(self):
        data = CheckRecord("x", (1, 2), [1, 2], "fail").to_dict()
        assert data == {"name": "x", "expected": [1, 2], "computed": [1, 2], "pass": False, "details": ""}

    def test_report_failures(self):
        report = VerifyReport("s", [CheckRecord("a", 1, 1, "pass"), CheckRecord("b", 1, 2, "fail")])
        assert not report.passed
        assert report.to_dict()["failed"] == ["b"]

    @pytest.mark.parametrize("suite,m", [("tangent", 3), ("phi", 3), ("phi", 4)])
    def test_suites_pass(self, suite, m):
        report = run_suite(suite, m, workers=1)
        assert report.passed, [r.to_dict() for r in report.failures()]
        assert [r.name for r in report.records] == sorted(r.name for r in report.records)

    def test_run_suites_single(self):
        reports = run_suites("tangent", 5, workers=1)
        assert [r.suite for r in reports] == ["tangent"]
        assert reports[0].passed


class TestChecks:
    """Individual checks at small sizes"""

    def test_e2_structure_m3(self):
        expected, computed = check_e2_structure(3, 4)
        assert expected == computed

    def test_e2_structure_reaches_q8(self):
        names = {name: args for name, _, args in suite_tasks("collapse", 5)}
        assert names["collapse/e2_structure/m=5"] == (5, 8)

    @pytest.mark.parametrize("ring", [CoeffRing.rationals(), CoeffRing.prime_field(2)], ids=["Q", "F2"])
    def test_cup_certificates_m3(self, ring):
        assert check_cup_certificates(3, ring, 3) == ([], [])

    def test_certificates_cover_both_rings(self):
        names = {name: args[2] for name, _, args in suite_tasks("products", 4)}
        for ring in (CoeffRing.rationals(), CoeffRing.prime_field(2)):
            assert names[f"products/certificates/m=4/{ring}"] == 5
