"""Tests for Lipschitz functionals, the Poincare check, ergodicity and covariance decay."""

import logging

import numpy as np
import pytest

from common.decisions import SequenceVerdict
from common.errors import DomainError, PreconditionError
from kernels import KernelSpec
from solver import SolutionField
from stats import (
    AverageSpec,
    ErgodicityVerdict,
    GFamily,
    LipschitzFactor,
    covariance_decay,
    default_suite,
    ergodicity_test,
    product_field,
    spatial_average,
    validate_suite,
    variance_vs_N,
)

N_VALUES = [0.8, 1.6, 3.2, 6.4, 12.8]


@pytest.fixture
def iid_field(grid_1d):
    """Independent N(1, 1) cells: every spatial average decorrelates."""
    values = 1.0 + np.random.default_rng(0).standard_normal((1000, grid_1d.n_cells))
    return SolutionField(grid_1d, 1.0, values)


@pytest.fixture
def flat_field(grid_1d):
    """Each replica is spatially constant: averages never decorrelate."""
    levels = 1.0 + np.random.default_rng(1).standard_normal((400, 1))
    return SolutionField(grid_1d, 1.0, np.repeat(levels, grid_1d.n_cells, axis=1))


# =============================================================================
# Factors and averages
# =============================================================================

def test_factor_values():
    w = np.array([0.0, 1.5, 3.0])
    assert LipschitzFactor(GFamily.CLIP01, 1.0)(w).tolist() == [0.0, 0.5, 1.0]
    assert LipschitzFactor(GFamily.IDENTITY_MINUS_1)(w).tolist() == [-1.0, 0.5, 2.0]
    assert LipschitzFactor(GFamily.COSINE, 2.0).lip == 2.0


def test_normalized_factor_vanishes_at_zero():
    g = LipschitzFactor(GFamily.COSINE, 2.0).with_normalization()
    assert g(0.0) == pytest.approx(0.0)
    assert g(np.pi / 2) == pytest.approx(-1.0)


def test_factor_validation():
    with pytest.raises(DomainError):
        LipschitzFactor(GFamily.SINE, 0.0)
    with pytest.raises(DomainError):
        LipschitzFactor(GFamily.CUSTOM, knots=(0.0, 1.0), values=(0.0, 3.0), lip_declared=1.0)
    with pytest.raises(DomainError):
        LipschitzFactor.from_dict({"family": "clip01", "level": 1.0})
    g = LipschitzFactor.from_dict({"family": "custom", "knots": [0, 1], "values": [0, 1], "lip": 1.0})
    assert g.label() == "custom(lip=1)"


def test_average_spec_validation():
    clip = LipschitzFactor(GFamily.CLIP01, 1.0)
    with pytest.raises(DomainError):
        AverageSpec((), ())
    with pytest.raises(DomainError):
        AverageSpec((clip, clip), ((0.0,),))
    spec = AverageSpec((clip, LipschitzFactor(GFamily.SINE, 1.0)), ((0.0,), (0.4,)), "0,e1")
    assert spec.k == 2
    assert spec.g_family == "clip01(1)*sine(1)"


def test_product_field_shifts(small_grid):
    values = np.arange(64, dtype=float)[None, :]
    field = SolutionField(small_grid, 0.0, values)
    ident = LipschitzFactor(GFamily.IDENTITY_MINUS_1)
    spec = AverageSpec((ident,), ((0.2,),))
    assert product_field(field, spec)[0, :3].tolist() == [1.0, 2.0, 3.0]


def test_off_grid_shift_is_snapped(small_grid, caplog):
    field = SolutionField(small_grid, 0.0, np.ones((1, 64)))
    spec = AverageSpec((LipschitzFactor(GFamily.IDENTITY_MINUS_1),), ((0.13,),))
    with caplog.at_level(logging.WARNING):
        product_field(field, spec)
    assert "snapped" in caplog.text


def test_spatial_average_window(small_grid):
    field = SolutionField(small_grid, 0.0, np.arange(64, dtype=float)[None, :])
    spec = AverageSpec.single(LipschitzFactor(GFamily.IDENTITY_MINUS_1))
    assert spatial_average(field, spec, 0.4).tolist() == [0.5]
    with pytest.raises(PreconditionError):
        spatial_average(field, spec, 4.0)


# =============================================================================
# Poincare check
# =============================================================================

def test_variance_vs_N_within_bound(iid_field):
    spec = AverageSpec.single(LipschitzFactor(GFamily.CLIP01, 1.0))
    check = variance_vs_N(iid_field, spec, N_VALUES, KernelSpec.exp_decay(1.0, 1))
    assert check.passed
    assert check.ratios[0] == pytest.approx(1.0)
    assert check.variances[-1] < check.variances[0] / 4
    assert [row["N"] for row in check.rows()] == N_VALUES


def test_variance_vs_N_band_rejects_fast_collapse(grid_1d):
    # only cell 0 fluctuates, so the average over n cells has variance ~ 1/n^2
    values = np.full((1000, grid_1d.n_cells), 1.5)
    values[:, 0] += 0.4 * np.random.default_rng(2).uniform(-1.0, 1.0, 1000)
    field = SolutionField(grid_1d, 1.0, values)
    spec = AverageSpec.single(LipschitzFactor(GFamily.CLIP01, 1.0))
    check = variance_vs_N(field, spec, N_VALUES, KernelSpec.exp_decay(1.0, 1))
    assert check.passed
    assert not check.within_band
    assert check.ratios[-1] < 1 / 3
    assert check.rows()[0]["within_band"] is True
    assert check.rows()[-1]["within_band"] is False
    assert any("left [1/3, 3]" in w for w in check.warnings)


def test_scaled_variances_follow_the_window_mass(iid_field):
    spec = AverageSpec.single(LipschitzFactor(GFamily.CLIP01, 1.0))
    check = variance_vs_N(iid_field, spec, N_VALUES, KernelSpec.exp_decay(1.0, 1))
    assert check.within_band
    scaled = check.scaled_variances()
    assert scaled[0] == pytest.approx(check.variances[0] * 0.8 / check.masses[0])
    assert [s / scaled[0] for s in scaled] == pytest.approx(check.ratios)
    assert check.to_dict()["within_band"] is True


def test_variance_vs_N_needs_replicas(small_grid):
    field = SolutionField(small_grid, 0.0, np.ones((10, 64)))
    spec = AverageSpec.single(LipschitzFactor(GFamily.CLIP01, 1.0))
    with pytest.raises(PreconditionError):
        variance_vs_N(field, spec, [0.8, 1.6], KernelSpec.exp_decay(1.0, 1))


# =============================================================================
# Ergodicity
# =============================================================================

def test_default_suite_is_valid():
    suite = default_suite(1, 0.4)
    validate_suite(suite)
    assert len(suite) == 5
    with pytest.raises(PreconditionError):
        validate_suite(suite[:1])


def test_ergodicity_consistent_for_decorrelated_cells(iid_field):
    result = ergodicity_test(iid_field, N_values=N_VALUES)
    assert result.verdict == ErgodicityVerdict.CONSISTENT
    assert all(m.verdict == SequenceVerdict.DECAYS for m in result.members)


def test_ergodicity_inconsistent_for_flat_fields(flat_field):
    result = ergodicity_test(flat_field, N_values=N_VALUES)
    assert result.verdict == ErgodicityVerdict.INCONSISTENT
    assert any(m.positive_level for m in result.members)
    assert result.threshold >= 5.0


def test_ergodicity_needs_three_windows(iid_field):
    with pytest.raises(PreconditionError):
        ergodicity_test(iid_field, N_values=[0.8, 1.6])


# =============================================================================
# Covariance decay
# =============================================================================

def test_covariance_decay_of_decorrelated_cells(iid_field):
    curve = covariance_decay(iid_field, LipschitzFactor(GFamily.IDENTITY_MINUS_1), [0, 1, 4])
    assert curve.covariance[0] == pytest.approx(1.0, rel=0.05)
    assert abs(curve.covariance[1]) < 0.02
    assert curve.distances == pytest.approx([0.0, 0.1, 0.4])


def test_covariance_decay_of_flat_fields(flat_field):
    curve = covariance_decay(flat_field, LipschitzFactor(GFamily.IDENTITY_MINUS_1), [0, 8, 32])
    assert curve.covariance[2] == pytest.approx(curve.covariance[0])
    assert curve.slope == pytest.approx(0.0, abs=1e-9)


def test_covariance_decay_lag_limits(iid_field):
    with pytest.raises(PreconditionError):
        covariance_decay(iid_field, LipschitzFactor(GFamily.IDENTITY_MINUS_1), [65])
