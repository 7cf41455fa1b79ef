"""White and colored noise slices on a periodic grid.

A slice holds one time increment of the noise divided by dt, cell-averaged
in space. White cells are independent with variance 1 / (dt dx^d); colored
slices are white slices pushed through a fixed transfer function in Fourier
space, so that their covariance approaches f(x - y) / dt.
"""

import functools
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from common.errors import PreconditionError, UnsupportedSpecError
from kernels.analytic import ball_volume
from kernels.base import PowerKernel, base_kernel
from kernels.correlation import correlation_of
from kernels.spec import Family, KernelSpec

from .grid import Grid

logger = logging.getLogger(__name__)

#: |h| below this fraction of its peak counts as decayed
DECAY_LEVEL = 1e-6
#: torus length must exceed this multiple of the decay radius
TORUS_FACTOR = 4.0
MIN_COVARIANCE_SLICES = 100


@dataclass
class NoiseSlice:
    """Noise values of shape (replicas, *grid.shape) for one time step."""

    grid: Grid
    values: np.ndarray
    #: (seed, block, step) the values were drawn from
    seed_path: Tuple[int, ...] = ()
    provenance: Dict[str, object] = field(default_factory=dict)

    @property
    def replicas(self) -> int:
        return int(self.values.shape[0])

    def __add__(self, other: "NoiseSlice") -> "NoiseSlice":
        return NoiseSlice(self.grid, self.values + other.values, (), dict(self.provenance))

    def scaled(self, factor: float) -> "NoiseSlice":
        return NoiseSlice(self.grid, factor * self.values, self.seed_path, dict(self.provenance))


def sample_white(grid: Grid, rng: np.random.Generator, replicas: int = 1,
                 seed_path: Tuple[int, ...] = ()) -> NoiseSlice:
    """Independent centered Gaussians with variance 1 / (dt dx^d) per cell."""
    std = 1.0 / math.sqrt(grid.dt * grid.cell_volume)
    values = std * rng.standard_normal((replicas, *grid.shape))
    return NoiseSlice(grid, values, seed_path, {"source": "white"})


# =============================================================================
# Transfer functions
# =============================================================================

@dataclass(frozen=True)
class ColoringPlan:
    """Fourier multiplier on the rfft layout; immutable once built."""

    grid: Grid
    transfer: np.ndarray
    source: str
    spec_label: str
    warnings: Tuple[str, ...] = ()
    #: the transfer is 1 everywhere and the slice passes through unchanged
    identity: bool = False

    def apply(self, white: NoiseSlice) -> NoiseSlice:
        if white.grid != self.grid:
            raise PreconditionError("Noise slice and coloring plan live on different grids")
        provenance = dict(white.provenance, source=self.source, kernel=self.spec_label)
        if self.warnings:
            provenance["warnings"] = list(self.warnings)
        if self.identity:
            return NoiseSlice(self.grid, white.values.copy(), white.seed_path, provenance)
        axes = self.grid.spatial_axes
        spectrum = np.fft.rfftn(white.values, axes=axes)
        colored = np.fft.irfftn(spectrum * self.transfer, s=self.grid.shape, axes=axes)
        return NoiseSlice(self.grid, colored, white.seed_path, provenance)


def origin_cell_average(spec: KernelSpec, grid: Grid) -> float:
    """Average of h over the origin cell, exact over the ball of equal volume."""
    kernel = base_kernel(spec)
    if isinstance(kernel, PowerKernel):
        rho = (grid.cell_volume / ball_volume(grid.d, 1.0)) ** (1.0 / grid.d)
        return kernel.power_mass(1.0, 0.0, rho) / grid.cell_volume
    return float(kernel.value(0.0))


def decay_radius(spec: KernelSpec, r_max: float = 1e6) -> float:
    """Smallest radius beyond which |h| stays below DECAY_LEVEL times its value at r = 1e-3."""
    kernel = base_kernel(spec)
    radii = np.geomspace(1e-3, r_max, 400)
    values = np.abs(np.asarray(kernel.value(radii), dtype=float))
    peak = values.max()
    above = np.nonzero(values > DECAY_LEVEL * peak)[0]
    if above.size == 0:
        return float(radii[0])
    return float(radii[min(above[-1] + 1, radii.size - 1)])


def h_plan(grid: Grid, spec: KernelSpec) -> ColoringPlan:
    """Transfer function of convolution with h sampled on the grid."""
    if spec.d != grid.d:
        raise PreconditionError(f"Kernel dimension {spec.d} does not match grid dimension {grid.d}")
    kernel = base_kernel(spec)
    dist = grid.torus_distance()
    with np.errstate(divide="ignore"):
        sampled = np.asarray(kernel.value(dist), dtype=float)
    sampled[(0,) * grid.d] = origin_cell_average(spec, grid)
    transfer = np.fft.rfftn(sampled * grid.cell_volume)
    warnings: List[str] = []
    radius = decay_radius(spec)
    if grid.length < TORUS_FACTOR * radius:
        message = (f"torus length {grid.length:g} is below {TORUS_FACTOR:g} x decay radius "
                   f"{radius:g} of {spec.label()}; periodization bias expected")
        logger.warning(message)
        warnings.append(message)
    return ColoringPlan(grid, transfer, "h", spec.label(), tuple(warnings))


def _snap_to_lattice(grid: Grid, frequency: float) -> Tuple[int, float]:
    spacing = 2 * math.pi / grid.length
    m = int(round(frequency / spacing))
    return m, m * spacing


def spectrum_plan(grid: Grid, spec: KernelSpec) -> ColoringPlan:
    """Transfer sqrt(f_hat) on the discrete frequency lattice.

    Atoms of mass m (averaging normalization) become weights m L^d at their
    lattice frequency. A singular density at the zero mode is dropped.
    """
    if spec.d != grid.d:
        raise PreconditionError(f"Kernel dimension {spec.d} does not match grid dimension {grid.d}")
    corr = correlation_of(spec)
    if spec.family == Family.WHITE_NOISE:
        shape = grid.k_squared().shape
        return ColoringPlan(grid, np.ones(shape), "spectrum", spec.label(), identity=True)
    if not corr.has_spectral_density and not corr.cosines:
        raise UnsupportedSpecError(f"{spec.label()} has no closed-form spectral density")
    warnings: List[str] = []
    k = grid.wavenumbers()
    rho = np.sqrt(sum(kk ** 2 for kk in k))
    weights = np.zeros(rho.shape)
    if corr.has_spectral_density:
        with np.errstate(divide="ignore", invalid="ignore"):
            weights = np.asarray(corr.spectral_density(rho), dtype=float)
        zero = (0,) * grid.d
        if not math.isfinite(weights[zero]):
            weights[zero] = 0.0
            warnings.append(f"zero mode of the singular spectral density of {spec.label()} dropped")
    volume = grid.length ** grid.d
    for term in corr.cosines:
        if term.is_constant:
            weights[(0,) * grid.d] += term.amplitude * volume
            continue
        m, snapped = _snap_to_lattice(grid, term.frequency)
        if not math.isclose(snapped, term.frequency, rel_tol=1e-9):
            message = f"frequency {term.frequency:g} snapped to lattice frequency {snapped:g}"
            logger.warning(message)
            warnings.append(message)
        if m == 0:
            weights[(0,) * grid.d] += term.amplitude * volume
            continue
        # half the amplitude at +k0 e_1 and half at -k0 e_1; the rfft layout keeps
        # both signs on the first axis unless d = 1, where -k0 is implicit
        for sign in (1, -1):
            index = [0] * grid.d
            index[0] = (sign * m) % grid.n_cells
            if grid.d == 1 and index[0] > grid.n_cells // 2:
                continue
            weights[tuple(index)] += 0.5 * term.amplitude * volume
    if np.any(weights < 0):
        raise UnsupportedSpecError(f"{spec.label()} has a negative spectral weight on the lattice")
    for w in warnings:
        logger.debug(w)
    return ColoringPlan(grid, np.sqrt(weights), "spectrum", spec.label(), tuple(warnings))


PLAN_CACHE_SIZE = 32


@functools.lru_cache(maxsize=PLAN_CACHE_SIZE)
def _cached(grid: Grid, spec: KernelSpec, source: str) -> ColoringPlan:
    return h_plan(grid, spec) if source == "h" else spectrum_plan(grid, spec)


def coloring_plan(grid: Grid, spec: KernelSpec) -> ColoringPlan:
    """Base kernels are convolved in space; correlations are synthesized spectrally."""
    return _cached(grid, spec, "h" if spec.is_h else "spectrum")


def color_by_h(white: NoiseSlice, spec: KernelSpec) -> NoiseSlice:
    if not spec.is_h:
        raise UnsupportedSpecError(f"{spec.family.value} is not a base kernel h")
    return _cached(white.grid, spec, "h").apply(white)


def color_by_spectrum(white: NoiseSlice, spec: KernelSpec) -> NoiseSlice:
    return _cached(white.grid, spec, "spectrum").apply(white)


def clear_plans() -> None:
    _cached.cache_clear()


# =============================================================================
# Validation
# =============================================================================

@dataclass
class CovarianceCurve:
    lags: np.ndarray
    covariance: np.ndarray
    stderr: np.ndarray
    samples: int

    def to_dict(self) -> dict:
        return {
            "lags": self.lags.tolist(),
            "covariance": self.covariance.tolist(),
            "stderr": self.stderr.tolist(),
            "samples": self.samples,
        }


def stack_values(slices) -> np.ndarray:
    if isinstance(slices, np.ndarray):
        return slices
    if isinstance(slices, NoiseSlice):
        return slices.values
    return np.concatenate([s.values for s in slices], axis=0)


def empirical_covariance(slices, max_lag: int, axis: int = 0) -> CovarianceCurve:
    """Cross-replica covariance per lag along a spatial axis, averaged over base points.

    ``slices`` is a NoiseSlice, a sequence of them, or an array whose first
    axis indexes independent samples.
    """
    values = stack_values(slices)
    samples = values.shape[0]
    if samples < MIN_COVARIANCE_SLICES:
        raise PreconditionError(f"empirical_covariance needs >= {MIN_COVARIANCE_SLICES} slices, got {samples}")
    centered = values - values.mean(axis=0, keepdims=True)
    lags = np.arange(max_lag + 1)
    cov = np.empty(lags.size)
    err = np.empty(lags.size)
    spatial = tuple(range(1, values.ndim))
    for i, lag in enumerate(lags):
        shifted = np.roll(centered, -int(lag), axis=1 + axis)
        per_sample = (centered * shifted).mean(axis=spatial)
        cov[i] = per_sample.mean() * samples / (samples - 1)
        err[i] = per_sample.std(ddof=1) / math.sqrt(samples)
    return CovarianceCurve(lags, cov, err, samples)
