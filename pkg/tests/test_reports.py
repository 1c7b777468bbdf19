import json
import math

import pytest

from finsler.reports import ResidualTable, VerificationReport, relative_residual


def _table() -> ResidualTable:
    table = ResidualTable()
    for i in range(15):
        table.add([float(i), 1.0], 10.0, 10.0 + i * 1e-3, label="bowl")
    return table


def test_relative_residual():
    assert relative_residual(10.0, 10.0) == 0.0
    assert relative_residual(1.0, 2.0) == pytest.approx(0.5)
    assert relative_residual(0.0, 1e-3, scale=1.0) == pytest.approx(1e-3)
    assert relative_residual(0.0, 0.0) == 0.0


def test_non_finite_residuals_become_infinite():
    table = ResidualTable()
    row = table.add([1.0, 1.0], math.nan, 1.0)
    assert row.abs_residual == math.inf
    assert row.rel_residual == math.inf
    assert not table.report(check="op", norm="euclidean", n=2, tolerance=1.0).passed


def test_worst_is_sorted_and_capped():
    worst = _table().worst()
    assert len(worst) == 10
    rels = [w.rel_residual for w in worst]
    assert rels == sorted(rels, reverse=True)
    assert worst[0].x == [14.0, 1.0]


def test_report_passes_only_with_all_sub_checks():
    table = _table()
    sub = table.sub_check("value", 1e-6)
    assert not sub.passed
    report = table.report(check="theorem1", norm="euclidean", n=2, tolerance=1e-2, sub_checks=[sub])
    assert report.max_rel_residual <= 1e-2
    assert not report.passed
    assert table.report(check="theorem1", norm="euclidean", n=2, tolerance=1e-2).passed


def test_json_is_canonical():
    report = _table().report(check="theorem1", norm="euclidean", n=2, tolerance=1e-2, p=2.0, seed=0)
    text = report.to_json()
    data = json.loads(text)
    assert data["schema"] == 1
    assert list(data) == sorted(data)
    assert text.endswith("\n")
    assert VerificationReport.from_json(text) == report
    assert VerificationReport.from_json(text).to_json() == text


def test_csv_layout():
    report = _table().report(check="op", norm="euclidean", n=2, tolerance=1.0)
    lines = report.to_csv().splitlines()
    assert lines[0] == "check,label,x1,x2,lhs,rhs,abs_residual,rel_residual"
    assert len(lines) == 16
    assert lines[1].startswith("op,bowl,0.0,1.0,10.0,10.0,")


def test_text_summary():
    report = _table().report(
        check="mvp", norm="euclidean", n=2, tolerance=1e-2, extras={"kappa": 3.14}, corrupt="matrix"
    )
    text = report.to_text()
    assert text.startswith("mvp: PASS")
    assert "corrupt     matrix" in text
    assert "kappa" in text
    assert "worst points:" in text
