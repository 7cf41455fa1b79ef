"""Tests for grids, random streams, noise coloring and the slice dump."""

import math

import numpy as np
import pytest

from common.errors import DomainError, PreconditionError, UnsupportedSpecError
from kernels import KernelSpec
from noise import (
    HEADER_SIZE,
    Grid,
    RandomStreams,
    color_by_h,
    clear_plans,
    color_by_spectrum,
    coloring_plan,
    dump_bytes,
    empirical_covariance,
    load_bytes,
    sample_white,
    spectrum_plan,
)
from noise.synthesis import _cached


def white(grid, replicas, seed=7, block=0, step=0):
    rng = RandomStreams(seed).generator(block, step)
    return sample_white(grid, rng, replicas, (seed, block, step))


# =============================================================================
# Grid
# =============================================================================

@pytest.mark.parametrize("n_cells", [4, 100, 255])
def test_grid_rejects_bad_cell_counts(n_cells):
    with pytest.raises(DomainError):
        Grid(1, n_cells, 0.1)


def test_grid_rejects_bad_dimension_and_spacing():
    with pytest.raises(DomainError):
        Grid(4, 16, 0.1)
    with pytest.raises(DomainError):
        Grid(1, 16, 0.0)
    with pytest.raises(DomainError):
        Grid(1, 16, 0.1, -1.0)


def test_grid_defaults(grid_1d):
    assert grid_1d.dt == pytest.approx(0.0025)
    assert grid_1d.length == pytest.approx(25.6)
    assert grid_1d.with_dt(0.001).dt == 0.001
    assert grid_1d.cells_for(1.6) == 16
    assert grid_1d.cells_for(0.01) == 1
    assert grid_1d.to_dict()["length"] == pytest.approx(25.6)


def test_torus_distance_wraps():
    grid = Grid(1, 8, 1.0)
    assert grid.torus_distance().tolist() == [0, 1, 2, 3, 4, 3, 2, 1]


def test_lattice_symbol_tracks_k_squared_at_low_frequency(grid_1d):
    k2 = grid_1d.k_squared()
    symbol = grid_1d.lattice_symbol()
    assert symbol[:4] == pytest.approx(k2[:4], rel=1e-3)
    assert np.all(symbol <= k2 + 1e-12)


# =============================================================================
# Random streams
# =============================================================================

def test_streams_are_reproducible():
    streams = RandomStreams(42)
    a = streams.generator(3, 11).standard_normal(32)
    b = RandomStreams(42).generator(3, 11).standard_normal(32)
    np.testing.assert_array_equal(a, b)


def test_streams_differ_by_block_step_and_seed():
    base = RandomStreams(42).generator(0, 0).standard_normal(8)
    for other in (RandomStreams(42).generator(1, 0), RandomStreams(42).generator(0, 1),
                  RandomStreams(43).generator(0, 0)):
        assert not np.array_equal(base, other.standard_normal(8))


def test_blocks_partition_replicas():
    streams = RandomStreams(1, batch_size=64)
    assert streams.blocks(130) == [(0, 0, 64), (1, 64, 64), (2, 128, 2)]
    assert streams.block_of(129) == (2, 1)
    with pytest.raises(DomainError):
        streams.blocks(0)


def test_streams_validate_inputs():
    with pytest.raises(DomainError):
        RandomStreams(-1)
    with pytest.raises(DomainError):
        RandomStreams(0, batch_size=0)


# =============================================================================
# White and colored slices
# =============================================================================

def test_white_cell_variance(grid_1d):
    noise = white(grid_1d, 400)
    assert noise.values.shape == (400, 256)
    assert noise.seed_path == (7, 0, 0)
    expected = 1.0 / (grid_1d.dt * grid_1d.dx)
    assert noise.values.var() == pytest.approx(expected, rel=0.03)


def test_plans_are_cached_per_grid_and_kernel(grid_1d, small_grid):
    spec = KernelSpec.exp_decay(1.0, 1)
    assert coloring_plan(grid_1d, spec) is coloring_plan(grid_1d, spec)
    assert coloring_plan(small_grid, spec) is not coloring_plan(grid_1d, spec)
    clear_plans()
    assert _cached.cache_info().currsize == 0


def test_white_plan_is_identity(grid_1d):
    plan = coloring_plan(grid_1d, KernelSpec.white_noise(1))
    assert plan.identity
    noise = white(grid_1d, 4)
    np.testing.assert_array_equal(plan.apply(noise).values, noise.values)


def test_plan_rejects_other_grid(grid_1d, small_grid):
    plan = coloring_plan(grid_1d, KernelSpec.exp_decay(1.0, 1))
    with pytest.raises(PreconditionError):
        plan.apply(white(small_grid, 2))


def test_plans_reject_dimension_mismatch(grid_1d):
    with pytest.raises(PreconditionError):
        spectrum_plan(grid_1d, KernelSpec.exp_decay(1.0, 2))


def test_constant_spectrum_gives_flat_slices(grid_1d):
    level = 0.25
    colored = color_by_spectrum(white(grid_1d, 400), KernelSpec.constant(level, 1))
    spread = np.ptp(colored.values, axis=1)
    assert np.all(spread < 1e-9 * np.abs(colored.values).max())
    assert colored.values[:, 0].var() * grid_1d.dt == pytest.approx(level, rel=0.2)


def test_exp_decay_covariance(grid_1d):
    spec = KernelSpec.exp_decay(1.0, 1)
    colored = color_by_spectrum(white(grid_1d, 400), spec)
    curve = empirical_covariance(colored, max_lag=10)
    for lag in (0, 5, 10):
        expected = math.exp(-lag * grid_1d.dx)
        assert curve.covariance[lag] * grid_1d.dt == pytest.approx(expected, abs=0.1)


def test_gaussian_h_covariance_at_origin(grid_1d):
    spec = KernelSpec.gaussian_h(0.5, 1)
    colored = color_by_h(white(grid_1d, 400), spec)
    curve = empirical_covariance(colored, max_lag=0)
    expected = (2 * math.pi * 0.5) ** -0.5
    assert curve.covariance[0] * grid_1d.dt == pytest.approx(expected, rel=0.1)
    assert colored.provenance["source"] == "h"


def test_color_by_h_needs_base_kernel(grid_1d):
    with pytest.raises(UnsupportedSpecError):
        color_by_h(white(grid_1d, 2), KernelSpec.exp_decay(1.0, 1))


def test_table_f_has_no_spectral_plan(grid_1d):
    with pytest.raises(UnsupportedSpecError):
        spectrum_plan(grid_1d, KernelSpec.table_f([1.0, 0.5, 0.0], 0.1, 1))


def test_riesz_zero_mode_dropped(grid_1d):
    plan = spectrum_plan(grid_1d, KernelSpec.riesz(0.5, 1))
    assert plan.transfer[0] == 0.0
    assert any("zero mode" in w for w in plan.warnings)


def test_cosine_frequency_snapped(grid_1d):
    plan = spectrum_plan(grid_1d, KernelSpec.cosine(1.0, 1))
    assert any("snapped" in w for w in plan.warnings)
    assert np.count_nonzero(plan.transfer) == 1


def test_empirical_covariance_needs_enough_samples(grid_1d):
    with pytest.raises(PreconditionError):
        empirical_covariance(white(grid_1d, 50), max_lag=2)


# =============================================================================
# Dump format
# =============================================================================

def test_dump_layout(small_grid):
    values = white(small_grid, 3).values
    data = dump_bytes(small_grid, values)
    assert data[:4] == b"SHEN"
    assert len(data) == HEADER_SIZE + values.size * 8
    grid, loaded = load_bytes(data)
    assert grid == small_grid
    np.testing.assert_array_equal(loaded, values)


def test_dump_rejects_bad_input(small_grid):
    with pytest.raises(DomainError):
        dump_bytes(small_grid, np.zeros(small_grid.size + 1))
    with pytest.raises(DomainError):
        load_bytes(b"SHE")
    data = bytearray(dump_bytes(small_grid, np.zeros(small_grid.size)))
    data[:4] = b"XXXX"
    with pytest.raises(DomainError):
        load_bytes(bytes(data))
