"""
Tests for the msic command line
"""

import json

import pytest
from click.testing import CliRunner

from msic.cli import EXIT_GUARD, EXIT_PARSE, EXIT_USAGE, cli


@pytest.fixture
def runner():
    return CliRunner()


def run_json(runner, *args):
    result = runner.invoke(cli, list(args))
    assert result.exit_code == 0, result.output
    return json.loads(result.stdout)


def test_validate(runner, instance_path):
    summary = run_json(runner, "validate", instance_path("ex_a"))
    assert summary["num_messages"] == 6
    assert summary["schema"] == 1


def test_report_ex_a_with_oracle(runner, instance_path):
    report = run_json(runner, "report", instance_path("ex_a"), "--oracle")
    assert report["lower_bound"] == 4
    assert report["upper_bound"] == 5
    assert report["n_tree"] == 1
    assert report["oracle"]["length"] == 4
    assert report["oracle"]["linear_optimal"]
    assert report["certified"]


def test_report_ex_b_certified_without_oracle(runner, instance_path):
    report = run_json(runner, "report", instance_path("ex_b"))
    assert report["lower_bound"] == report["upper_bound"] == 2
    assert report["oracle"] is None
    assert report["certified"]


def test_report_text_format(runner, instance_path):
    result = runner.invoke(cli, ["report", instance_path("ex_c"), "--format", "text"])
    assert result.exit_code == 0
    assert "lower bound" in result.stdout
    assert "message-disconnected" in result.stdout


def test_report_is_byte_identical_across_runs(runner, instance_path):
    first = runner.invoke(cli, ["report", instance_path("ex_a"), "--trace"]).stdout
    second = runner.invoke(cli, ["report", instance_path("ex_a"), "--trace"]).stdout
    assert first == second


def test_missing_file_is_a_parse_error(runner):
    result = runner.invoke(cli, ["report", "missing.json"])
    assert result.exit_code == EXIT_PARSE


def test_invalid_instance_is_a_parse_error(runner, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"num_messages": 2, "senders": [[1, 2]], "wants": [[1], []]}))
    result = runner.invoke(cli, ["validate", str(path)])
    assert result.exit_code == EXIT_PARSE
    assert "wants[0][0]" in result.output


def test_usage_error(runner):
    result = runner.invoke(cli, ["bound"])
    assert result.exit_code == EXIT_USAGE


def test_unknown_option(runner, instance_path):
    result = runner.invoke(cli, ["oracle", instance_path("ex_a"), "--fast"])
    assert result.exit_code == EXIT_USAGE


def test_oracle_guard(runner, instance_path, monkeypatch):
    monkeypatch.setattr("msic.config.Config.ORACLE_MAX_MESSAGES", 3)
    result = runner.invoke(cli, ["oracle", instance_path("ex_a")])
    assert result.exit_code == EXIT_GUARD


def test_oracle_max_len(runner, instance_path):
    document = run_json(runner, "oracle", instance_path("ex_a"), "--max-len", "3")
    assert document["exhausted"]
    assert not document["certified"]


def test_oracle_certifies_lower_bound(runner, instance_path):
    document = run_json(runner, "oracle", instance_path("ex_a"))
    assert document["length"] == 4
    assert document["certified"]


def test_bound_with_trace(runner, instance_path):
    document = run_json(runner, "bound", instance_path("ex_a"), "--trace")
    assert document["lower_bound"] == 4
    assert document["n_iv"] == 2
    assert document["trace"]["steps"][-1]["step"] == "iv-0"


def test_bound_exhaustive(runner, instance_path):
    assert run_json(runner, "bound", instance_path("ex_a"), "--exhaustive")["lower_bound"] == 4


def test_classify(runner, instance_path):
    document = run_json(runner, "classify", instance_path("ex_b"))
    assert document["leaf_sccs"] == [{"vertices": [1, 2, 3], "class": "message-connected"}]


def test_simplify(runner, tmp_path):
    path = tmp_path / "inst.json"
    path.write_text(json.dumps({"num_messages": 2, "senders": [[1, 2]], "wants": [[], [1]]}))
    document = run_json(runner, "simplify", str(path))
    assert document["senders"] == [[1]]
    assert document["removed"] == [2]


def test_code_then_verify(runner, instance_path, tmp_path):
    code = run_json(runner, "code", instance_path("ex_a"))
    assert len(code["rows"]) == 5
    path = tmp_path / "code.json"
    path.write_text(json.dumps(code))
    certificate = run_json(runner, "verify", instance_path("ex_a"), str(path), "--exhaustive")
    assert certificate["decodable"]
    assert certificate["exhaustive"]


def test_verify_reports_failure(runner, instance_path, tmp_path):
    path = tmp_path / "code.json"
    path.write_text(json.dumps([{"sender": 1, "coeffs": [1, 0]}]))
    certificate = run_json(runner, "verify", instance_path("ex_c"), str(path))
    assert not certificate["decodable"]
    assert certificate["failure"] == {"receiver": 1, "wanted": 2}


def test_dot_counts(runner, instance_path):
    result = runner.invoke(cli, ["dot", instance_path("ex_a")])
    assert result.exit_code == 0
    assert result.stdout.count("[label=") == 6
    assert result.stdout.count("[color=black]") == 6
    assert result.stdout.count("color=red") == 9


def test_dot_with_trace_draws_dummies(runner, instance_path):
    result = runner.invoke(cli, ["dot", instance_path("ex_c"), "--trace"])
    assert result.exit_code == 0
    assert 'label="d3", style=dashed' in result.stdout
    assert result.stdout.count("[color=black]") == 3


def test_jobs_only_reaches_the_oracle(runner, instance_path):
    result = runner.invoke(cli, ["--help"])
    assert "Worker processes for the oracle search" in " ".join(result.output.split())
    document = run_json(runner, "--jobs", "1", "bound", instance_path("ex_a"), "--exhaustive")
    assert document["lower_bound"] == 4
