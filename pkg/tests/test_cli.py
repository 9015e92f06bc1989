import json
from pathlib import Path

import pytest
from pytest_mock import MockerFixture

from ellchar_lib.chaincx import PermComplex
from ellchar_lib.cli import main
from ellchar_lib.fgab import FinAb
from ellchar_lib.ggroup import cyclic_group
from ellchar_lib.suites import PointResult, SuiteReport

FREE = [(0, (0,))]


@pytest.fixture
def complex_file(tmp_path: Path) -> Path:
    c = PermComplex.build(
        cyclic_group(1),
        FinAb((3,)),
        {1: [FREE], 0: [FREE]},
        {(1, 0, 0): {0: 1, 1: -1}},
    )
    path = tmp_path / "complex.json"
    path.write_text(json.dumps(c.to_dict(), default=int), encoding="utf-8")
    return path


def run(
    argv: list[str], capsys: pytest.CaptureFixture[str]
) -> tuple[int, str]:
    code = main(argv)
    return code, capsys.readouterr().out


def test_torus_build(capsys: pytest.CaptureFixture[str]) -> None:
    argv = ["torus", "build", "--q", "2", "--n", "2", "--h", "2"]
    code, out = run(argv, capsys)
    assert code == 0
    data = json.loads(out)
    assert data["order"] == 12
    assert data["invariant_factors"] == [2, 6]
    assert data["filtration_orders"] == [4, 1]


@pytest.mark.parametrize(
    ("in_options", "out_count"),
    [
        pytest.param([], 12),
        pytest.param(["--strongly-general"], 6),
        pytest.param(["--ell", "3"], 4),
        pytest.param(["--ell", "2"], 3),
    ],
)
def test_chars_enumerate(
    in_options: list[str],
    out_count: int,
    capsys: pytest.CaptureFixture[str],
) -> None:
    argv = ["chars", "enumerate", "--q", "2", "--n", "2", "--h", "2"]
    code, out = run([*argv, *in_options], capsys)
    assert code == 0
    assert len(json.loads(out)) == out_count


def test_chars_enumerate_values(capsys: pytest.CaptureFixture[str]) -> None:
    argv = ["chars", "enumerate", "--q", "2", "--n", "2", "--values", "1/3"]
    code, out = run(argv, capsys)
    assert code == 0
    [entry] = json.loads(out)
    assert entry["level"] == 1
    assert entry["general"]
    code = main([*argv[:-1], "1/5"])
    assert code == 2
    assert "takes the values 1/5" in capsys.readouterr().err


def test_weil_sigma(capsys: pytest.CaptureFixture[str]) -> None:
    code, out = run(["weil", "sigma", "--q", "2", "--n", "2"], capsys)
    assert code == 0
    data = json.loads(out)
    assert [d["sigma"]["irreducible"] for d in data] == [False, True, True]


@pytest.mark.parametrize(
    ("in_options", "out_dimensions"),
    [
        pytest.param(["homology", "--spec", "F:3"], [1, 1]),
        pytest.param(["homology", "--spec", "Q"], [1, 1]),
        pytest.param(
            ["isotypic", "--spec", "cyc:3", "--theta", "1/3"], [0, 0]
        ),
        pytest.param(
            ["isotypic", "--spec", "cyc:3", "--theta", "0/1"], [1, 1]
        ),
        pytest.param(
            [
                "derived",
                "--spec",
                "F:3",
                "--theta",
                "0/1",
                "--truncation",
                "3",
            ],
            [1, 1, 0],
        ),
    ],
)
def test_complex(
    in_options: list[str],
    out_dimensions: list[int],
    complex_file: Path,
    capsys: pytest.CaptureFixture[str],
) -> None:
    code, out = run(
        ["complex", in_options[0], "--in", str(complex_file), *in_options[1:]],
        capsys,
    )
    assert code == 0
    data = json.loads(out)
    homology = data["homology"]
    assert [homology[k]["dimension"] for k in sorted(homology)] == (
        out_dimensions
    )


def test_complex_euler(
    complex_file: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    argv = ["complex", "euler", "--in", str(complex_file), "--spec", "cyc:3"]
    code, out = run(argv, capsys)
    assert code == 0
    assert json.loads(out)["group"] == "C1 x Z/3"


@pytest.mark.parametrize(
    ("in_options", "out_error_msg"),
    [
        pytest.param(["derived", "--spec", "F:3"], "derived needs --theta"),
        pytest.param(["homology", "--spec", "Z"], "do not form a field"),
        pytest.param(["homology", "--spec", "F:6"], "invalid coefficient"),
    ],
)
def test_complex_invalid(
    in_options: list[str],
    out_error_msg: str,
    complex_file: Path,
    capsys: pytest.CaptureFixture[str],
) -> None:
    argv = ["complex", in_options[0], "--in", str(complex_file)]
    assert main([*argv, *in_options[1:]]) == 2
    assert out_error_msg in capsys.readouterr().err


def test_verify_diagram(capsys: pytest.CaptureFixture[str]) -> None:
    argv = ["verify", "diagram", "--q", "2", "--n", "2", "--h", "2"]
    code, out = run([*argv, "--ell", "5"], capsys)
    assert code == 0
    reports = json.loads(out)
    assert reports
    assert all(r["asserted"] for r in reports)
    code, _ = run([*argv, "--ell", "3", "--tamper"], capsys)
    assert code == 1
    assert main([*argv, "--ell", "2"]) == 2
    assert "residue characteristic" in capsys.readouterr().err


def test_verify_multiplicity(capsys: pytest.CaptureFixture[str]) -> None:
    argv = ["verify", "multiplicity", "--q", "2", "--n", "2", "--ell", "3"]
    code, out = run(argv, capsys)
    assert code == 0
    [report] = json.loads(out)
    assert report["factor"] == 3


def test_suite(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    argv = ["suite", "torus", "--q", "2", "--n", "2", "--h", "1", "--ell", "3"]
    code, out = run([*argv, "--json", "--out", str(tmp_path)], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["passed"]
    assert [r["point"] for r in report["rows"]] == ["(2, 2, 1)"]
    assert (tmp_path / "torus.json").exists()
    assert (tmp_path / "torus.csv").exists()


def test_suite_invalid(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["suite", "torus", "--q", "2"]) == 2
    assert "must be given together" in capsys.readouterr().err
    argv = ["suite", "torus", "--q", "2", "--n", "2", "--h", "1", "--ell", "2"]
    assert main(argv) == 2
    with pytest.raises(SystemExit):
        main(["suite", "nope"])


def test_suite_failure(
    mocker: MockerFixture, capsys: pytest.CaptureFixture[str]
) -> None:
    failed = SuiteReport(
        name="torus",
        passed=False,
        rows=[PointResult(point="(2, 2, 1)", passed=False, detail="boom")],
    )
    run_suite = mocker.patch("ellchar_lib.cli.run_suite", return_value=failed)
    code, out = run(["suite", "torus", "--seed", "7"], capsys)
    assert code == 1
    assert "torus" in out
    config = run_suite.call_args.args[1]
    assert config.seed == 7
