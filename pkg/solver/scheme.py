"""Exponential Euler time step for du = 1/2 Laplacian u dt + sigma(u) eta.

One step maps u to P (u + sigma(u) xi dt), where xi is the noise slice and
P multiplies Fourier mode k by exp(-symbol(k) dt / 2). The spatial mean is
carried outside the transform, so spatially constant fields stay constant
to the last bit.
"""

import logging
from enum import Enum
from typing import Optional

import numpy as np

from common.errors import BlowUpError, PreconditionError
from noise.grid import Grid
from noise.synthesis import NoiseSlice

from .field import SolutionField
from .sigma import SigmaSpec

logger = logging.getLogger(__name__)


class Scheme(str, Enum):
    #: exact heat semigroup factor exp(-|k|^2 dt / 2)
    EXP_EULER = "exp_euler"
    #: finite-difference Laplacian symbol; the heat factor is a positive kernel
    EXP_EULER_LATTICE = "exp_euler_lattice"


def heat_factor(grid: Grid, scheme: Scheme = Scheme.EXP_EULER) -> np.ndarray:
    """Per-step Fourier multiplier on the rfft layout."""
    scheme = Scheme(scheme)
    symbol = grid.k_squared() if scheme == Scheme.EXP_EULER else grid.lattice_symbol()
    return np.exp(-0.5 * symbol * grid.dt)


def apply_heat(values: np.ndarray, grid: Grid, factor: np.ndarray) -> np.ndarray:
    """Apply the heat factor to the fluctuation about each replica's spatial mean."""
    axes = grid.spatial_axes
    mean = values.mean(axis=axes, keepdims=True)
    fluctuation = values - mean
    if not np.any(fluctuation):
        return np.broadcast_to(mean, values.shape).copy()
    smoothed = np.fft.irfftn(np.fft.rfftn(fluctuation, axes=axes) * factor, s=grid.shape, axes=axes)
    return mean + smoothed


def step(field: SolutionField, noise: Optional[NoiseSlice], sigma: SigmaSpec,
         scheme: Scheme = Scheme.EXP_EULER, factor: Optional[np.ndarray] = None,
         replica_offset: int = 0) -> SolutionField:
    """Advance one time step.

    Raises:
        BlowUpError: when any cell is non-finite after the step; carries the
            step index and the (global) ids of the offending replicas.
    """
    grid = field.grid
    if factor is None:
        factor = heat_factor(grid, scheme)
    values = field.values
    if noise is not None and not sigma.is_zero:
        if noise.grid != grid or noise.values.shape != values.shape:
            raise PreconditionError(
                f"Noise slice of shape {noise.values.shape} does not match field of shape {values.shape}"
            )
        values = values + sigma(values) * noise.values * grid.dt
    values = apply_heat(values, grid, factor)
    step_index = field.step_index + 1
    finite = np.isfinite(values).reshape(values.shape[0], -1).all(axis=1)
    if not finite.all():
        bad = (np.nonzero(~finite)[0] + replica_offset).tolist()
        logger.error("Blow-up at step %d in %d replicas", step_index, len(bad))
        raise BlowUpError(step_index, bad)
    return SolutionField(grid, step_index * grid.dt, values, step_index, field.provenance)
