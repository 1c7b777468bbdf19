import json

import pytest

from finsler.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, CliConfig, build_parser, execute, run

DIAG41 = "quad:[[4,0],[0,1]]"


def _report(capsys) -> dict:
    return json.loads(capsys.readouterr().out)


def test_passing_check_exits_zero(capsys):
    code = run(["theorem1", "--norm", DIAG41, "--field", "poly:y1^2+y2^2", "--points", "10", "--seed", "7"])
    assert code == EXIT_OK
    report = _report(capsys)
    assert report["check"] == "theorem1"
    assert report["passed"] is True
    assert report["schema"] == 1
    assert report["seed"] == 7


def test_failing_check_exits_one(capsys):
    code = run(["theorem1", "--norm", DIAG41, "--points", "10", "--corrupt", "matrix"])
    assert code == EXIT_FAILED
    assert _report(capsys)["passed"] is False


@pytest.mark.parametrize(
    "argv, flag",
    [
        (["theorem1", "--norm", "quad:[[4,0],[0,1", "--field", "poly:y1^2"], "--norm"),
        (["theorem1", "--norm", "q:4"], "--norm"),
        (["theorem1", "--norm", DIAG41, "--field", "poly:y1^2+y3"], "--field"),
        (["theorem1", "--norm", DIAG41, "--p", "1"], "--p"),
        (["liouville", "--norm", "euclidean", "--n", "3"], "arguments"),
        (["kelvin2", "--norm", DIAG41, "--r-min", "0"], "arguments"),
        (["mvp", "--norm", DIAG41, "--field", "poly:y1^2+y2^2"], "--field"),
        (["mvp", "--norm", DIAG41, "--radii", "0.5,-1"], "--radii"),
        (["dual-weak", "--norm", DIAG41, "--bump-center", "0,0"], "--bump-center"),
        (["classify", "--norm", DIAG41, "--corrupt", "exponent"], "--corrupt"),
    ],
)
def test_usage_errors_exit_two(capsys, argv, flag):
    assert run(argv) == EXIT_USAGE
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "finsler-verify: error:" in captured.err
    if flag != "arguments":
        assert flag in captured.err


def test_usage_error_writes_no_file(tmp_path):
    out = tmp_path / "report.json"
    assert run(["theorem1", "--norm", "cube:3", "--output", str(out)]) == EXIT_USAGE
    assert not out.exists()


def test_unknown_subcommand_and_help(capsys):
    assert run(["frobnicate"]) == EXIT_USAGE
    assert run(["--help"]) == EXIT_OK
    assert run(["liouville", "--help"]) == EXIT_OK
    help_text = capsys.readouterr().out
    assert "--extent" in help_text
    assert "(default: 200.0)" in help_text


def test_reruns_are_byte_identical(tmp_path):
    argv = ["kelvin-algebra", "--norm", "quad:[[5,3],[3,5]]", "--points", "50", "--seed", "17"]
    first, second = tmp_path / "a" / "first.json", tmp_path / "b" / "second.json"
    assert run(argv + ["--output", str(first)]) == EXIT_OK
    assert run(argv + ["--output", str(second)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


def test_csv_and_text_formats(capsys):
    argv = ["op", "--norm", DIAG41, "--at", "1,1;0.5,-2"]
    assert run(argv + ["--format", "csv"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "check,label,x1,x2,lhs,rhs,abs_residual,rel_residual"
    assert len(lines) == 3
    assert run(argv + ["--format", "text"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("op: PASS")


def test_seed_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("FINSLER_SEED", "42")
    assert run(["dual", "--norm", DIAG41, "--points", "3"]) == EXIT_OK
    assert _report(capsys)["seed"] == 42


def test_config_round_trip():
    config = CliConfig(command="theorem1", norm=DIAG41, p=3.0, points=10, parallel=True, seed=4)
    argv = config.to_argv()
    assert argv[:3] == ["theorem1", "--seed", "4"]
    assert "--parallel" in argv
    assert CliConfig.from_namespace(build_parser().parse_args(argv)) == config


def test_execute_returns_report():
    ns = build_parser().parse_args(["classify", "--norm", "q:4", "--n", "2", "--points", "20", "--seed", "1"])
    report = execute(CliConfig.from_namespace(ns))
    assert report.passed
    assert report.extras["quadratic"] is False


def test_mvp_and_liouville_commands(capsys):
    assert run(["mvp", "--norm", DIAG41, "--radii", "0.5", "--at", "1,1"]) == EXIT_OK
    assert _report(capsys)["extras"]["radii"] == [0.5]
    assert run(["liouville", "--norm", DIAG41, "--points", "5", "--density", "512"]) == EXIT_OK
    assert _report(capsys)["sub_checks"][0]["name"] == "total mass"
