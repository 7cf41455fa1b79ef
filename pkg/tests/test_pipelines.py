"""Tests for the analyze, simulate and islands pipelines."""

import json

import pytest

from common.errors import BlowUpError, PreconditionError
from config import parse_config
from noise import load_bytes
from pipelines import (
    EXIT_ERROR,
    EXIT_GATE,
    EXIT_OK,
    AnalyzePipeline,
    IslandsPipeline,
    SimulatePipeline,
)
from pipelines.analyze import build_report
from kernels import Classification, KernelSpec
from solver import Scheme


def make_config(kernel, **sections):
    raw = {"kernel": kernel, "solver": {"seed": 3}}
    raw.update(sections)
    return parse_config(raw)


EXP_KERNEL = {"family": "exp_decay_f", "d": 1, "rate": 1.0}
SMALL_GRID = {"n_cells": 64, "dx": 0.1}


def read_json(path):
    return json.loads(path.read_text())


# =============================================================================
# analyze
# =============================================================================

def test_build_report_for_exp_decay():
    report = build_report(KernelSpec.exp_decay(1.0, 1))
    assert report.dalang_ok
    assert report.gate_ok
    assert report.classification == Classification.ERGODIC
    assert report.mixing_ok is True
    assert report.p is None
    bound = report.malliavin
    assert bound["kernel_integral"] < bound["threshold"]
    assert bound["value"] > 0
    assert bound["h_at_t"][0] == 1.0


def test_build_report_skips_verdicts_when_dalang_fails():
    report = build_report(KernelSpec.white_noise(2))
    assert not report.dalang_ok
    assert report.classification == Classification.UNKNOWN
    assert report.atom is None
    assert report.malliavin is None


async def test_analyze_writes_report(tmp_path):
    pipeline = AnalyzePipeline(make_config(EXP_KERNEL), output_dir=str(tmp_path))
    result = await pipeline.run()
    assert result.success
    assert result.exit_code == EXIT_OK
    assert result.artifacts == ["report.json"]

    data = read_json(tmp_path / "report.json")
    assert data["classification"] == "Ergodic"
    assert data["malliavin"]["lambda0"] > 0
    assert data["meta"]["schema"] == "kernel_report"
    assert data["meta"]["seed"] == 3
    assert data["meta"]["config_hash"] == pipeline.config.config_hash

    logs = list((tmp_path / "logs").glob("analyze-*.json"))
    assert len(logs) == 1
    assert read_json(logs[0])["details"]["exit_code"] == EXIT_OK


async def test_analyze_gate_failure_exits_with_two(tmp_path):
    config = make_config({"family": "white_noise", "d": 2})
    result = await AnalyzePipeline(config, output_dir=str(tmp_path)).run()
    assert not result.success
    assert result.exit_code == EXIT_GATE
    assert "Dalang" in result.error
    assert read_json(tmp_path / "report.json")["dalang_ok"] is False


# =============================================================================
# simulate
# =============================================================================

def simulate_config(**overrides):
    sections = {
        "grid": SMALL_GRID,
        "solver": {"seed": 3, "t_final": 0.05, "replicas": 1000, "snapshots": [0.025]},
        "stats": {"N_values": [0.4, 0.8, 1.6], "lags": [0, 1, 2], "g_family": ["clip01"]},
        "analysis": {"runs": ["poincare", "ergodicity", "mixing"]},
        "output": {"dump": True},
    }
    sections.update(overrides)
    return make_config(EXP_KERNEL, **sections)


@pytest.mark.slow
async def test_simulate_writes_all_artifacts(tmp_path):
    result = await SimulatePipeline(simulate_config(), output_dir=str(tmp_path), threads=2).run()
    assert result.success, result.error
    assert set(result.artifacts) == {
        "snapshots.csv", "poincare.csv", "ergodicity.csv", "covariance_decay.csv",
        "fields.bin", "summary.json",
    }

    lines = (tmp_path / "snapshots.csv").read_text().splitlines()
    assert lines[0].startswith("# schema=snapshots; config_hash=")
    assert lines[1] == "t,step,mean,variance,max_mean_deviation_stderr"
    assert len(lines) == 4

    grid, values = load_bytes((tmp_path / "fields.bin").read_bytes())
    assert grid.n_cells == 64
    assert values.shape == (1000, 64)

    summary = read_json(tmp_path / "summary.json")
    assert summary["meta"]["schema"] == "simulation_summary"
    assert summary["ergodicity"]["verdict"] in ("ConsistentWithErgodic", "Inconsistent", "Inconclusive")


@pytest.mark.slow
async def test_simulate_artifacts_do_not_depend_on_threads(tmp_path):
    config = simulate_config(analysis={"runs": ["mixing"]}, output={})
    for threads in (1, 3):
        result = await SimulatePipeline(config, output_dir=str(tmp_path / f"t{threads}"), threads=threads).run()
        assert result.success, result.error
    for name in ("snapshots.csv", "covariance_decay.csv", "summary.json"):
        assert (tmp_path / "t1" / name).read_bytes() == (tmp_path / "t3" / name).read_bytes()


async def test_simulate_gate_failure(tmp_path):
    config = make_config({"family": "white_noise", "d": 2}, grid={"n_cells": 8, "dx": 0.1})
    result = await SimulatePipeline(config, output_dir=str(tmp_path)).run()
    assert result.exit_code == EXIT_GATE
    assert result.artifacts == []


async def test_simulate_requires_window_sizes(tmp_path):
    config = simulate_config(stats={}, analysis={"runs": ["poincare"]})
    result = await SimulatePipeline(config, output_dir=str(tmp_path)).run()
    assert result.exit_code == EXIT_ERROR
    assert "N_values" in result.error


async def test_simulate_requires_grid(tmp_path):
    result = await SimulatePipeline(make_config(EXP_KERNEL), output_dir=str(tmp_path)).run()
    assert result.exit_code == EXIT_ERROR
    assert "[grid]" in result.error


def explode(field, noise, sigma, scheme=None, factor=None, replica_offset=0):
    raise BlowUpError(3, [replica_offset + 1])


async def test_simulate_blowup_keeps_replica_diagnostics(monkeypatch, tmp_path):
    monkeypatch.setattr("solver.ensemble.step", explode)
    config = simulate_config(solver={"seed": 3, "t_final": 0.05, "replicas": 2})
    result = await SimulatePipeline(config, output_dir=str(tmp_path)).run()
    assert result.exit_code == EXIT_ERROR
    assert result.data == {"step": 3, "replicas": [1]}
    assert "Non-finite" in result.error


# =============================================================================
# islands
# =============================================================================

async def test_islands_scope(tmp_path):
    config = make_config(EXP_KERNEL, grid=SMALL_GRID)
    result = await IslandsPipeline(config, output_dir=str(tmp_path)).run()
    assert result.exit_code == EXIT_ERROR
    assert "space-time white noise" in result.error


async def test_islands_small_scan(tmp_path):
    config = make_config(
        {"family": "white_noise", "d": 1},
        grid={"n_cells": 256, "dx": 0.1},
        islands={"t": 0.5, "alphas": [0.1], "N_values": [40, 80, 160], "replicas": 8},
    )
    result = await IslandsPipeline(config, output_dir=str(tmp_path), threads=2).run()
    assert result.success, result.error
    assert result.artifacts == ["islands.csv", "islands_smoothed.csv", "sup_growth.csv", "islands_summary.json"]

    rows = (tmp_path / "islands.csv").read_text().splitlines()
    assert rows[1].startswith("alpha,N,replica_count")
    assert len(rows) == 2 + 3

    summary = read_json(tmp_path / "islands_summary.json")
    assert summary["scan"]["n_values"] == pytest.approx([4.0, 8.0, 16.0])
    assert "rows" not in summary["scan"]
    assert summary["tail"] is None


@pytest.mark.parametrize("islands, expected", [
    ({}, Scheme.EXP_EULER_LATTICE),
    ({"scheme": "exp_euler"}, Scheme.EXP_EULER),
])
async def test_islands_scheme_comes_from_islands_section(monkeypatch, tmp_path, islands, expected):
    seen = {}

    async def capture(*args, **kwargs):
        seen.update(kwargs)
        raise PreconditionError("stopped after capture")

    monkeypatch.setattr("pipelines.islands.scan_async", capture)
    config = make_config(
        {"family": "white_noise", "d": 1},
        grid={"n_cells": 256, "dx": 0.1},
        solver={"seed": 3, "scheme": "exp_euler"},
        islands={"N_values": [40, 80], **islands},
    )
    result = await IslandsPipeline(config, output_dir=str(tmp_path)).run()
    assert result.exit_code == EXIT_ERROR
    assert seen["scheme"] == expected
