#!/usr/bin/env python3
"""
Tests for the hardedge command line: output formats, schema and exit codes
"""

import json
import math
import re
import sys
from fractions import Fraction
from pathlib import Path

import pytest
from click.testing import CliRunner

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.cli.main import cli
from src.cli.output import validate_record
from src.config.settings import Settings
from src.core import moments
from src.core.verification import displayed_limit_moment


@pytest.fixture
def runner():
    return CliRunner(mix_stderr=False)


def run_json(runner, *args):
    result = runner.invoke(cli, [*args, "--format", "json"])
    assert result.exit_code == 0, result.stderr
    return json.loads(result.stdout)


def test_version(runner):
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert "1.0.0" in result.stdout


def test_moment_rational_limit(runner):
    record = run_json(runner, "moment", "--k", "2", "--beta", "2", "--alpha", "4", "--limit", "--mode", "rational")
    assert record["results"]["value"] == "1/60"
    assert record["exact"] is True
    assert record["method"] == "partition"
    validate_record(record)


def test_moment_finite_float(runner):
    record = run_json(runner, "moment", "--k", "1", "--beta", "7.3", "--alpha", "5", "--N", "12")
    assert float(record["results"]["value"]) == pytest.approx(2.4, rel=1e-15)
    assert record["exact"] is False
    assert record["query"]["N"] == "12"


def test_moment_complex_mellin(runner):
    record = run_json(runner, "moment", "--s", "0.75", "--s-imag", "0.5", "--beta", "2", "--alpha", "3")
    expected = moments.mellin_limit_beta2(0.75 + 0.5j, 3.0)
    assert float(record["results"]["value_re"]) == pytest.approx(expected.real, rel=1e-15)
    assert float(record["results"]["value_im"]) == pytest.approx(expected.imag, rel=1e-15)
    assert record["method"] == "mellin-beta2"


def test_moment_rational_fraction_input(runner):
    record = run_json(runner, "moment", "--k", "3", "--beta", "1/2", "--alpha", "9/2", "--mode", "rational")
    expected = displayed_limit_moment(3, Fraction(1, 2), Fraction(9, 2))
    assert record["results"]["value"] == str(expected)


def test_moment_csv(runner):
    result = runner.invoke(cli, ["moment", "--k", "1", "--beta", "2", "--alpha", "3", "--format", "csv"])
    assert result.exit_code == 0
    header, row = result.stdout.strip().splitlines()
    assert "results.value" in header.split(",")
    assert "query.alpha" in header.split(",")


def test_moment_text(runner):
    result = runner.invoke(cli, ["moment", "--k", "1", "--beta", "2", "--alpha", "3"])
    assert result.exit_code == 0
    assert "value" in result.stdout


def test_moment_limit_and_size_conflict(runner):
    result = runner.invoke(cli, ["moment", "--k", "1", "--alpha", "3", "--limit", "--N", "4"])
    assert result.exit_code == 2


@pytest.mark.parametrize("args", [
    ["moment", "--s", "5", "--alpha", "3"],
    ["moment", "--k", "4", "--alpha", "3"],
    ["moment", "--s", "1.5", "--alpha", "3", "--mode", "rational"],
    ["moment", "--k", "2", "--beta", "2", "--alpha", "4", "--method", "integer-case"],
    ["zeta", "--nu", "-1", "--order", "2"],
    ["zeta", "--nu", "0", "--order", "3"],
    ["zeta", "--nu", "0", "--order", "2", "--method", "zero_sum", "--mode", "rational"],
    ["density", "--kind", "hard_edge", "--alpha", "1", "--x", "1"],
    ["density", "--kind", "marchenko_pastur", "--c", "1", "--x", "5"],
])
def test_precondition_exit_code(runner, args):
    result = runner.invoke(cli, args)
    assert result.exit_code == 2


def test_zeta_values(runner):
    assert run_json(runner, "zeta", "--nu", "0", "--order", "2")["results"]["recursion"] == "0.25"
    rational = run_json(runner, "zeta", "--nu", "0.5", "--order", "2", "--mode", "rational")
    assert rational["results"]["recursion"] == "1/6"
    assert rational["exact"] is True


def test_zeta_both_methods(runner):
    record = run_json(runner, "zeta", "--nu", "1", "--order", "8", "--method", "both")
    assert float(record["results"]["relative_gap"]) < 1e-8
    assert float(record["results"]["recursion"]) == pytest.approx(1 / 46080, rel=1e-14)


def test_simulate_is_deterministic(runner):
    args = ["simulate", "--N", "5", "--beta", "2", "--alpha", "3", "--k", "1",
            "--samples", "2000", "--seed", "7", "--workers", "1", "--format", "json"]
    raw = [runner.invoke(cli, args).stdout for _ in range(2)]
    # records match byte for byte once the wall-clock field is blanked
    blanked = [re.sub(r'"elapsed_ms": *[0-9.eE+-]+', '"elapsed_ms": 0', text) for text in raw]
    assert blanked[0] == blanked[1]

    first, second = (json.loads(text) for text in raw)
    first.pop("elapsed_ms")
    second.pop("elapsed_ms")
    assert first == second
    assert first["seed"] == 7
    assert float(first["results"]["exact"]) == pytest.approx(5 / 3)
    validate_record({**first, "elapsed_ms": 0.0})


def test_simulate_dump_spectrum(runner):
    records = run_json(runner, "simulate", "--N", "3", "--beta", "1", "--alpha", "2", "--samples", "10",
                       "--workers", "1", "--dump-spectrum", "2")
    assert [record["command"] for record in records] == ["simulate", "simulate-spectrum", "simulate-spectrum"]
    assert sorted(records[1]["results"]) == ["lambda_1", "lambda_2", "lambda_3"]


@pytest.mark.slow
def test_simulate_calibrated(runner):
    record = run_json(runner, "simulate", "--N", "4", "--beta", "3.7", "--alpha", "6", "--k", "2",
                      "--samples", "20000", "--seed", "1")
    assert abs(float(record["results"]["z_score"])) <= 4


def test_simulate_invalid_config(runner):
    result = runner.invoke(cli, ["simulate", "--N", "0", "--beta", "2", "--alpha", "3"])
    assert result.exit_code == 2


def test_verify_duality_json(runner):
    result = runner.invoke(cli, ["verify", "--suite", "duality", "--format", "json"])
    assert result.exit_code == 0, result.stderr
    payload = json.loads(result.stdout)
    assert payload["suite"] == "duality"
    assert len(payload["records"]) == 30
    for record in payload["records"]:
        assert record["results"]["status"] == "passed"
        validate_record(record)


def test_verify_text_summary(runner):
    result = runner.invoke(cli, ["verify", "--suite", "duality"])
    assert result.exit_code == 0
    assert "30/30 checks passed" in result.stdout


def test_density_marchenko_pastur(runner):
    record = run_json(runner, "density", "--kind", "marchenko_pastur", "--c", "1", "--x", "2")
    assert float(record["results"]["density"]) == pytest.approx(1 / (2 * math.pi), rel=1e-14)


def test_density_multiple_points(runner):
    records = run_json(runner, "density", "--kind", "hard_edge", "--beta-class", "2", "--alpha", "0.5",
                       "--x", "1", "--x", "4")
    assert [record["query"]["x"] for record in records] == ["1.0", "4.0"]


def test_mellin_single_eigenvalue(runner):
    record = run_json(runner, "mellin", "--kind", "finite_beta2", "--N", "1", "--alpha", "3", "--s", "1")
    assert float(record["results"]["value"]) == pytest.approx(1 / 3, rel=1e-10)
    assert record["error_bound"] is not None


def test_mellin_hard_edge_scaled(runner):
    record = run_json(runner, "mellin", "--kind", "hard_edge", "--beta-class", "2", "--alpha", "3.5",
                      "--s", "1.2", "--tolerance", "1e-6")
    limit = moments.mellin_limit_beta2(1.2, 3.5)
    assert float(record["results"]["limit_moment"]) == pytest.approx(limit, abs=1e-6)


def test_mellin_tolerance_exit_code(runner):
    result = runner.invoke(cli, ["mellin", "--kind", "hard_edge", "--beta-class", "2", "--alpha", "1.5",
                                 "--s", "1.2", "--tolerance", "1e-30"])
    assert result.exit_code == 3


def test_threads_from_environment(monkeypatch):
    monkeypatch.setenv("HARDEDGE_THREADS", "3")
    assert Settings().threads == 3
    monkeypatch.setenv("HARDEDGE_THREADS", "0")
    with pytest.raises(ValueError):
        Settings()
