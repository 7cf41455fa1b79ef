"""Tests for sigma families, the time step, the ensemble solver and Picard iteration."""

import math

import numpy as np
import pytest

from common.errors import BlowUpError, DomainError, GateFailure, PreconditionError
from kernels import KernelSpec
from noise import Grid
from solver import (
    Scheme,
    SigmaSpec,
    SolutionField,
    apply_heat,
    gate_check,
    heat_factor,
    lognormal_variance,
    nonergodic_reference,
    picard_solve,
    plan_run,
    solve,
    solve_async,
    step,
)

EXP = KernelSpec.exp_decay(1.0, 1)


# =============================================================================
# Sigma
# =============================================================================

def test_sigma_families():
    u = np.array([-20.0, 0.0, 2.0])
    assert SigmaSpec.constant(0.5)(u).tolist() == [0.5, 0.5, 0.5]
    assert SigmaSpec.linear()(u).tolist() == u.tolist()
    assert SigmaSpec.affine_clipped(1.0, 2.0)(u).tolist() == [-19.0, 1.0, 5.0]
    assert SigmaSpec.affine_clipped(1.0, -2.0).lip == 2.0
    assert SigmaSpec.constant(0.0).is_zero
    assert SigmaSpec.linear().sigma0 == 0.0


def test_custom_sigma_interpolates_and_checks_lipschitz():
    sigma = SigmaSpec.custom([0.0, 1.0], [0.0, 2.0], lip=2.0)
    assert sigma(np.array([0.5, 3.0])).tolist() == [1.0, 2.0]
    with pytest.raises(DomainError):
        SigmaSpec.custom([0.0, 1.0], [0.0, 2.0], lip=1.0)
    with pytest.raises(DomainError):
        SigmaSpec.custom([1.0, 0.0], [0.0, 0.0], lip=1.0)


def test_sigma_from_dict():
    assert SigmaSpec.from_dict({"family": "constant", "c0": 2}).params["c0"] == 2.0
    assert SigmaSpec.from_dict(SigmaSpec.affine_clipped(0.5, 1.0).to_dict()) == SigmaSpec.affine_clipped(0.5, 1.0)
    with pytest.raises(DomainError):
        SigmaSpec.from_dict({"family": "linear", "c0": 1})
    with pytest.raises(DomainError):
        SigmaSpec.from_dict({"c0": 1})


# =============================================================================
# Time step
# =============================================================================

@pytest.mark.parametrize("scheme", list(Scheme))
def test_heat_factor_preserves_mean(small_grid, scheme):
    factor = heat_factor(small_grid, scheme)
    assert factor[0] == 1.0
    values = np.random.default_rng(0).standard_normal((3, 64))
    smoothed = apply_heat(values, small_grid, factor)
    assert smoothed.mean(axis=1) == pytest.approx(values.mean(axis=1))
    assert np.all(smoothed.std(axis=1) < values.std(axis=1))


def test_constant_field_stays_constant(small_grid):
    values = np.full((2, 64), 1.5)
    out = apply_heat(values, small_grid, heat_factor(small_grid))
    np.testing.assert_array_equal(out, values)


def test_step_reports_blowup_replicas(small_grid):
    values = np.ones((3, 64))
    values[1, 5] = np.nan
    field = SolutionField(small_grid, 0.0, values)
    with pytest.raises(BlowUpError) as info:
        step(field, None, SigmaSpec.constant(0.0), replica_offset=64)
    assert info.value.step == 1
    assert info.value.replicas == [65]


def blow_up_at_step_three(field, noise, sigma, scheme=Scheme.EXP_EULER, factor=None, replica_offset=0):
    raise BlowUpError(3, [replica_offset + 1])


def test_solve_reports_blowup_of_every_block(monkeypatch, small_grid):
    monkeypatch.setattr("solver.ensemble.step", blow_up_at_step_three)
    with pytest.raises(BlowUpError) as info:
        solve(small_grid, EXP, SigmaSpec.linear(), 0.05, replicas=130, seed=1, threads=3)
    assert info.value.step == 3
    assert info.value.replicas == [1, 65, 129]


def test_solve_passes_worker_errors_through(monkeypatch, small_grid):
    def refuse(*args, **kwargs):
        raise PreconditionError("bad block")

    monkeypatch.setattr("solver.ensemble.step", refuse)
    with pytest.raises(PreconditionError, match="bad block"):
        solve(small_grid, EXP, SigmaSpec.linear(), 0.05, replicas=2)


def test_initial_field_validation(small_grid):
    with pytest.raises(DomainError):
        SolutionField.initial(small_grid, 1, np.ones(10))
    with pytest.raises(DomainError):
        SolutionField.initial(small_grid, 1, np.full(64, np.inf))


# =============================================================================
# Gate and planning
# =============================================================================

def test_gate_rejects_white_noise_in_two_dimensions():
    with pytest.raises(GateFailure):
        gate_check(KernelSpec.white_noise(2))
    warnings = gate_check(KernelSpec.white_noise(2), unsafe=True)
    assert any("gate skipped" in w for w in warnings)


def test_gate_passes_exp_decay():
    assert gate_check(EXP) == []


def test_plan_guards(small_grid):
    with pytest.raises(PreconditionError):
        plan_run(Grid(1, 64, 0.1, 0.01), EXP, SigmaSpec.linear(), 0.1)
    with pytest.raises(DomainError):
        plan_run(small_grid, EXP, SigmaSpec.linear(), 0.0)
    with pytest.raises(DomainError):
        plan_run(small_grid, EXP, SigmaSpec.linear(), 0.1, snapshot_times=[0.2])
    with pytest.raises(PreconditionError):
        plan_run(small_grid, KernelSpec.exp_decay(1.0, 2), SigmaSpec.linear(), 0.1)


def test_plan_lands_on_t_final(small_grid):
    plan = plan_run(small_grid, EXP, SigmaSpec.linear(), 0.01, snapshot_times=[0.0, 0.005])
    assert plan.n_steps == 4
    assert plan.snapshot_steps == (0, 2, 4)


# =============================================================================
# Ensemble
# =============================================================================

async def test_results_do_not_depend_on_threads(small_grid):
    kwargs = dict(replicas=130, seed=11, batch_size=64)
    one = await solve_async(small_grid, EXP, SigmaSpec.linear(), 0.05, threads=1, **kwargs)
    many = await solve_async(small_grid, EXP, SigmaSpec.linear(), 0.05, threads=3, **kwargs)
    np.testing.assert_array_equal(one.field_at(0.05).values, many.field_at(0.05).values)
    np.testing.assert_array_equal(one.snapshots[-1].moments.mean, many.snapshots[-1].moments.mean)


async def test_seed_changes_results(small_grid):
    a = await solve_async(small_grid, EXP, SigmaSpec.linear(), 0.02, replicas=4, seed=1)
    b = await solve_async(small_grid, EXP, SigmaSpec.linear(), 0.02, replicas=4, seed=2)
    assert not np.array_equal(a.field_at(0.02).values, b.field_at(0.02).values)


def test_zero_sigma_keeps_initial_data(small_grid):
    run = solve(small_grid, EXP, SigmaSpec.constant(0.0), 0.05, replicas=3)
    np.testing.assert_array_equal(run.field_at(0.05).values, np.ones((3, 64)))


def test_constant_correlation_gives_flat_fields(small_grid):
    run = solve(small_grid, KernelSpec.constant(1.0, 1), SigmaSpec.linear(), 0.05, replicas=8, seed=3)
    values = run.field_at(0.05).values
    assert np.all(np.ptp(values, axis=1) < 1e-10)
    assert not np.allclose(values[:, 0], 1.0)


def test_linear_sigma_keeps_mean_one(small_grid):
    run = solve(small_grid, EXP, SigmaSpec.linear(), 0.1, replicas=256, seed=5)
    summary = run.summary()
    last = summary["snapshots"][-1]
    assert last["mean"] == pytest.approx(1.0, abs=0.05)
    assert last["variance"] > 0
    assert summary["replicas"] == 256


def test_reducer_without_fields(small_grid):
    def reducer(block, t, values):
        return block, values.shape[0]

    run = solve(small_grid, EXP, SigmaSpec.linear(), 0.01, replicas=70, seed=0,
                keep_fields=False, reducer=reducer)
    assert run.snapshots[-1].reduced == [(0, 64), (1, 6)]
    with pytest.raises(DomainError):
        run.field_at(0.01)


def test_threads_must_be_positive(small_grid):
    with pytest.raises(DomainError):
        solve(small_grid, EXP, SigmaSpec.linear(), 0.01, threads=0)


# =============================================================================
# Picard iteration and references
# =============================================================================

def test_picard_reaches_time_stepped_solution(small_grid):
    t = 0.02
    result = picard_solve(small_grid, EXP, SigmaSpec.linear(), t, iterations=12, seed=9)
    run = solve(small_grid, EXP, SigmaSpec.linear(), t, replicas=1, seed=9)
    assert result.differences[-1] < 1e-12
    assert result.differences[-1] < result.differences[0]
    np.testing.assert_allclose(result.field.values[0], run.field_at(t).values[0], rtol=1e-10)
    assert len(result.iterates) == 13


def test_picard_rejects_negative_iterations(small_grid):
    with pytest.raises(DomainError):
        picard_solve(small_grid, EXP, SigmaSpec.linear(), 0.01, iterations=-1)


def test_lognormal_reference():
    assert lognormal_variance(1.0, 1.0) == pytest.approx(math.e - 1)
    samples = nonergodic_reference(SigmaSpec.linear(), 0.5, 1.0, 20000, seed=4)
    assert samples.mean() == pytest.approx(1.0, abs=0.02)
    assert samples.var() == pytest.approx(lognormal_variance(0.5, 1.0), rel=0.1)


def test_euler_maruyama_reference_for_constant_sigma():
    samples = nonergodic_reference(SigmaSpec.constant(1.0), 0.5, 1.0, 20000, seed=4, steps=50)
    assert samples.mean() == pytest.approx(1.0, abs=0.02)
    assert samples.var() == pytest.approx(0.25, rel=0.1)
