"""Tests for intermittency islands, sup growth and the tail fit."""

import math

import numpy as np
import pytest

from common.errors import DomainError, PreconditionError
from noise import Grid
from solver import SolutionField
from islands import (
    Window,
    d_alpha,
    island_measure,
    max_alpha,
    nonpositive_replicas,
    scan_async,
    smoothed_island_measure,
    sup_constant,
    sup_growth,
    tail_exponent,
    theory_dimension,
    threshold,
    validate_alphas,
)
from islands.intermittency import fit_tail


@pytest.fixture
def spiky_field():
    """Ten hot cells at the left end of a cold torus."""
    grid = Grid(1, 64, 0.5)
    values = np.ones((2, 64))
    values[:, :10] = 100.0
    return SolutionField(grid, 6.0, values)


# =============================================================================
# Closed forms
# =============================================================================

def test_dimension_formulas():
    assert d_alpha(1.0, 6.0) == pytest.approx(4 * 3 ** -1.5)
    assert theory_dimension(0.1, 6.0) == pytest.approx(1 - 0.4 * 3 ** -1.5)
    assert d_alpha(max_alpha(6.0), 6.0) == pytest.approx(0.5)
    assert sup_constant(1.5) == pytest.approx(0.75)
    with pytest.raises(DomainError):
        d_alpha(0.0, 1.0)
    with pytest.raises(DomainError):
        sup_constant(-1.0)


def test_threshold():
    assert threshold(0.5, 1.0) == 1.0
    assert threshold(0.5, 0.5) == 1.0
    assert threshold(1.0, math.exp(8.0)) == pytest.approx(math.exp(4.0))


def test_validate_alphas():
    validate_alphas([0.1, 0.2, 0.3], 6.0)
    with pytest.raises(PreconditionError):
        validate_alphas([0.1, 0.7], 6.0)


# =============================================================================
# Island measures
# =============================================================================

def test_island_measure_counts_hot_cells(spiky_field):
    assert island_measure(spiky_field, 0.5, 16.0).tolist() == [5.0, 5.0]


def test_smoothed_measure_sandwiches_the_raw_one():
    grid = Grid(1, 64, 0.5)
    values = np.exp(2.0 * np.random.default_rng(3).standard_normal((20, 64)))
    m = smoothed_island_measure(SolutionField(grid, 6.0, values), 0.3, 16.0)
    assert np.all(m.lower <= m.raw)
    assert np.all(m.raw <= m.upper)


def test_island_windows_need_one_dimension_and_room(spiky_field):
    field = SolutionField(Grid(2, 8, 0.5), 1.0, np.ones((1, 8, 8)))
    with pytest.raises(PreconditionError):
        island_measure(field, 0.1, 2.0)
    with pytest.raises(PreconditionError):
        island_measure(spiky_field, 0.1, 40.0)
    with pytest.raises(PreconditionError):
        sup_growth(spiky_field, None, [20.0], Window.SYMMETRIC)


def test_nonpositive_replicas(spiky_field):
    assert nonpositive_replicas(spiky_field) == []
    spiky_field.values[1, 30] = -1e-3
    assert nonpositive_replicas(spiky_field) == [1]


def test_sup_growth_is_nondecreasing(spiky_field):
    curve = sup_growth(spiky_field, None, [16.0, 2.0, 8.0])
    assert curve.n_values == [2.0, 8.0, 16.0]
    assert np.all(np.diff(curve.running_max, axis=1) >= 0)
    assert curve.running_max[0, -1] == pytest.approx(math.log(100.0))
    assert curve.theory == pytest.approx(sup_constant(6.0))


# =============================================================================
# Tail fit
# =============================================================================

def test_fit_tail_recovers_slope():
    a_values = [1.0, 1.5, 2.0, 2.5, 3.0]
    samples = 10 ** 7
    counts = [int(samples * math.exp(-1.2 * a ** 1.5)) for a in a_values]
    fit = fit_tail(6.0, a_values, counts, samples)
    assert fit.slope == pytest.approx(-1.2, rel=1e-3)
    assert fit.theory == pytest.approx(-d_alpha(1.0, 6.0))
    assert fit.warnings == []


def test_fit_tail_truncates_sparse_levels():
    fit = fit_tail(6.0, [1.0, 2.0, 3.0, 4.0], [5000, 800, 100, 3], 10 ** 5)
    assert len(fit.a_values) == 3
    assert "truncated" in fit.warnings[0]


def test_fit_tail_preconditions():
    with pytest.raises(PreconditionError):
        fit_tail(6.0, [1.0, 2.0], [500, 100], 100)
    with pytest.raises(PreconditionError):
        fit_tail(6.0, [1.0, 2.0], [500, 1], 10 ** 5)


def test_tail_exponent_needs_samples(spiky_field):
    with pytest.raises(PreconditionError):
        tail_exponent(spiky_field, None, [1.0, 2.0], pool_cells=True)


# =============================================================================
# Ensemble scan
# =============================================================================

async def test_small_scan(grid_1d):
    report = await scan_async(grid_1d, 1.0, [0.1], [4.0, 8.0, 16.0], replicas=16, seed=3, threads=2)
    scan = report.scan
    assert scan.measures.shape == (16, 1, 3)
    assert np.all(scan.lower <= scan.measures)
    assert np.all(scan.measures <= scan.upper)
    assert report.nonpositive == 0
    assert report.tail is None
    assert np.all(np.diff(report.sup.running_max, axis=1) >= 0)
    assert len(scan.rows()) == 3
    assert scan.rows()[0]["theory_dim"] == pytest.approx(theory_dimension(0.1, 1.0))


async def test_scan_rejects_bad_inputs(grid_1d):
    with pytest.raises(PreconditionError):
        await scan_async(grid_1d, 1.0, [0.5], [4.0], replicas=2, seed=0)
    with pytest.raises(PreconditionError):
        await scan_async(grid_1d, 1.0, [0.1], [40.0], replicas=2, seed=0)
    with pytest.raises(PreconditionError):
        await scan_async(Grid(2, 8, 0.5), 1.0, [0.1], [2.0], replicas=2, seed=0)
    with pytest.raises(DomainError, match="exceed 1"):
        await scan_async(grid_1d, 1.0, [0.1], [1.0, 4.0], replicas=2, seed=0)
