from pathlib import Path

import polars as pl
import pytest

from ellchar_lib.fgab import FinAb
from ellchar_lib.ggroup import abelian_group, all_subgroups, cyclic_group
from ellchar_lib.suite_config import Config, GridSpec
from ellchar_lib.suites import (
    SUITES,
    PointResult,
    SuiteReport,
    faithful_linear_class,
    fixed_point_control,
    run_suite,
    summary,
    write_report,
)


@pytest.fixture
def small_config() -> Config:
    return Config(
        grid=GridSpec(points=[(2, 2, 1, 3), (2, 2, 2, 3), (3, 2, 1, 2)]),
        primes=[2, 3],
        diagram_points=[(2, 2, 2, 5), (2, 2, 2, 3)],
        complex_count=2,
        random_class_count=4,
        truncation=4,
    )


def make_report() -> SuiteReport:
    rows = [
        PointResult(point="a", passed=True, detail="ok"),
        PointResult(point="b", passed=False, detail="H_1"),
        PointResult(point="c", passed=False),
    ]
    return SuiteReport(name="sample", passed=False, rows=rows)


def test_summary() -> None:
    assert summary(make_report()).row(0) == ("sample", 3, 2)
    empty = SuiteReport(name="empty", passed=True, rows=[])
    assert summary(empty).row(0) == ("empty", 0, 0)


def test_write_report(tmp_path: Path) -> None:
    json_path, csv_path = write_report(make_report(), tmp_path / "out")
    assert json_path.name == "sample.json"
    assert SuiteReport.model_validate_json(
        json_path.read_text(encoding="utf-8")
    ) == make_report()
    df = pl.read_csv(csv_path)
    assert df.columns == ["point", "passed", "detail"]
    assert df["point"].to_list() == ["a", "b", "c"]
    assert df["passed"].to_list() == [True, False, False]


def test_run_suite_unknown() -> None:
    with pytest.raises(ValueError, match="unknown suite 'nope'"):
        run_suite("nope", Config())


@pytest.mark.parametrize(
    "in_name", ["teichmueller", "torus", "lifts", "position", "weil"]
)
def test_grid_suites(in_name: str, small_config: Config) -> None:
    report = run_suite(in_name, small_config)
    assert report.name == in_name
    assert report.rows
    assert report.passed, [r.detail for r in report.rows if not r.passed]


def test_torus_suite_rows(small_config: Config) -> None:
    report = run_suite("torus", small_config)
    assert [r.point for r in report.rows] == [
        "(2, 2, 1)",
        "(2, 2, 2)",
        "(3, 2, 1)",
    ]
    assert [r.detail for r in report.rows] == [
        "Z/3",
        "Z/2 x Z/6",
        "Z/8",
    ]


def test_diagram_suite(small_config: Config) -> None:
    report = run_suite("diagram", small_config)
    assert report.passed
    assert len(report.rows) == 2
    assert report.rows[0].detail.endswith("0 tampered caught")


@pytest.mark.slow
@pytest.mark.parametrize(
    "in_name", ["isotypic", "euler-reduction", "multiplicity"]
)
def test_complex_suites(in_name: str, small_config: Config) -> None:
    report = run_suite(in_name, small_config)
    assert report.passed, [r.detail for r in report.rows if not r.passed]


@pytest.mark.slow
def test_isotypic_suite_has_control(small_config: Config) -> None:
    report = run_suite("isotypic", small_config)
    assert len(report.rows) == 2 * 2 + 1
    assert report.rows[-1].point == "fixed point T=Z/3 ell=3"


@pytest.mark.slow
@pytest.mark.parametrize("in_name", ["projectivity", "induction-square"])
def test_corpus_suites(in_name: str) -> None:
    report = run_suite(in_name, Config(primes=[2, 3]))
    assert report.passed, [r.detail for r in report.rows if not r.passed]


def test_fixed_point_control() -> None:
    result = fixed_point_control(4)
    assert result.passed
    assert result.detail == "dims [1, 1, 1, 1]"


def test_faithful_linear_class() -> None:
    h = all_subgroups(cyclic_group(6))[-1]
    x = faithful_linear_class(h)
    assert x is not None
    assert x.degree == 1
    assert len(set(x.values)) == 6
    klein = all_subgroups(abelian_group(FinAb((2, 2))))[-1]
    assert faithful_linear_class(klein) is None


def test_suite_names() -> None:
    assert list(SUITES) == [
        "teichmueller",
        "torus",
        "lifts",
        "position",
        "projectivity",
        "induction-square",
        "isotypic",
        "euler-reduction",
        "weil",
        "diagram",
        "multiplicity",
    ]
