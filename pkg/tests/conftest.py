"""Shared fixtures."""

import pytest

from kernels.correlation import clear_cache
from noise.grid import Grid
from noise.synthesis import clear_plans


@pytest.fixture(autouse=True)
def fresh_caches():
    yield
    clear_cache()
    clear_plans()


@pytest.fixture
def grid_1d():
    return Grid(1, 256, 0.1)


@pytest.fixture
def small_grid():
    return Grid(1, 64, 0.1)
