"""Tests for the shelab command line."""

import json
from pathlib import Path

import pytest
from typer.testing import CliRunner

from cli import app
from common.errors import BlowUpError

SAMPLES = Path(__file__).resolve().parent.parent / "samples"

runner = CliRunner()


@pytest.fixture(autouse=True)
def single_thread(monkeypatch):
    monkeypatch.setenv("SHELAB_THREADS", "1")


def test_analyze_sample(tmp_path):
    result = runner.invoke(app, ["analyze", "-c", str(SAMPLES / "analyze_exp_decay.toml"), "-o", str(tmp_path)])
    assert result.exit_code == 0, result.output
    assert "Kernel Report" in result.output
    assert "Ergodic" in result.output
    assert (tmp_path / "report.json").exists()


def test_analyze_gate_failure_exit_code(tmp_path):
    result = runner.invoke(app, ["analyze", "-c", str(SAMPLES / "analyze_white_d2.toml"), "-o", str(tmp_path)])
    assert result.exit_code == 2
    assert "Gate failure" in result.output
    assert json.loads((tmp_path / "report.json").read_text())["dalang_ok"] is False


def test_seed_override_is_recorded(tmp_path):
    result = runner.invoke(app, [
        "analyze", "-c", str(SAMPLES / "analyze_exp_decay.toml"), "-o", str(tmp_path), "--seed", "42",
    ])
    assert result.exit_code == 0, result.output
    assert json.loads((tmp_path / "report.json").read_text())["meta"]["seed"] == 42


def test_missing_config_is_an_error(tmp_path):
    result = runner.invoke(app, ["analyze", "-c", str(tmp_path / "none.toml"), "-o", str(tmp_path)])
    assert result.exit_code == 1
    assert "Config file not found" in result.output


def test_invalid_config_is_an_error(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text('[kernel]\nfamily = "exp_decay_f"\nrate = 1.0\n')
    result = runner.invoke(app, ["analyze", "-c", str(path), "-o", str(tmp_path)])
    assert result.exit_code == 1
    assert "seed" in result.output


def test_islands_scope_error(tmp_path):
    result = runner.invoke(app, [
        "islands", "-c", str(SAMPLES / "nonergodic_constant.toml"), "-o", str(tmp_path),
    ])
    assert result.exit_code == 1
    assert "island statistics" in result.output


def test_bad_threads_flag(tmp_path):
    result = runner.invoke(app, [
        "analyze", "-c", str(SAMPLES / "analyze_exp_decay.toml"), "-o", str(tmp_path), "-t", "0",
    ])
    assert result.exit_code == 1


def test_report_command(tmp_path):
    runner.invoke(app, ["analyze", "-c", str(SAMPLES / "analyze_exp_decay.toml"), "-o", str(tmp_path)])
    result = runner.invoke(app, ["report", str(tmp_path)])
    assert result.exit_code == 0, result.output
    assert "Kernel Report" in result.output
    assert "analyze" in result.output
    assert "Artifacts" in result.output
    assert "report.json" in result.output


def test_report_on_empty_and_missing_directories(tmp_path):
    result = runner.invoke(app, ["report", str(tmp_path)])
    assert result.exit_code == 0
    assert "No artifacts" in result.output
    result = runner.invoke(app, ["report", str(tmp_path / "missing")])
    assert result.exit_code == 1


def test_simulate_blowup_exit_code(monkeypatch, tmp_path):
    def explode(field, noise, sigma, scheme=None, factor=None, replica_offset=0):
        raise BlowUpError(3, [replica_offset + 1])

    monkeypatch.setattr("solver.ensemble.step", explode)
    path = tmp_path / "blowup.toml"
    path.write_text(
        '[kernel]\nfamily = "exp_decay_f"\nrate = 1.0\n\n'
        '[grid]\nn_cells = 64\ndx = 0.1\n\n'
        '[solver]\nseed = 3\nt_final = 0.05\nreplicas = 2\n\n'
        '[analysis]\nruns = ["mixing"]\n'
    )
    result = runner.invoke(app, ["simulate", "-c", str(path), "-o", str(tmp_path / "run")])
    assert result.exit_code == 1
    assert "Blow-up at step 3" in result.output
    assert "[1]" in result.output
