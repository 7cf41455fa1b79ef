"""Ensemble island scans for the parabolic Anderson model.

The scan runs one PAM ensemble (linear sigma, space-time white noise, d = 1)
and reduces each replica block to island measures, sup statistics and tail
counts as soon as it finishes, so full fields are never kept.
"""

import functools
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import anyio
import numpy as np

from common.errors import DomainError, PreconditionError
from kernels.spec import KernelSpec
from noise.grid import Grid
from noise.rng import DEFAULT_BATCH_SIZE
from solver.ensemble import solve_async
from solver.field import SolutionField
from solver.scheme import Scheme
from solver.sigma import SigmaSpec

from .intermittency import (
    SupGrowthCurve,
    TailFit,
    Window,
    curve_from_statistics,
    d_alpha,
    fit_tail,
    nonpositive_replicas,
    smoothed_island_measure,
    sup_statistics,
    tail_counts,
    theory_dimension,
    threshold,
)

logger = logging.getLogger(__name__)


@dataclass
class IslandScan:
    t: float
    alphas: List[float]
    n_values: List[float]
    #: a_N per (alpha, N)
    thresholds: np.ndarray
    #: island measures, replicas x alphas x N
    measures: np.ndarray
    #: 1-Lipschitz sandwich of the measures, same shape
    lower: np.ndarray
    upper: np.ndarray
    replica_count: int
    warnings: List[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        with np.errstate(divide="ignore"):
            logs = np.log(self.measures)
        self.dims = logs / np.log(np.asarray(self.n_values))[None, None, :]

    @property
    def zero_counts(self) -> np.ndarray:
        return np.count_nonzero(self.measures == 0, axis=0)

    def _quantile(self, q: float) -> np.ndarray:
        out = np.full(self.dims.shape[1:], -math.inf)
        for i in range(out.shape[0]):
            for j in range(out.shape[1]):
                finite = self.dims[:, i, j][np.isfinite(self.dims[:, i, j])]
                if finite.size:
                    out[i, j] = float(np.quantile(finite, q))
        return out

    @property
    def dim_estimates(self) -> np.ndarray:
        """Median of log(measure) / log N over replicas with nonzero measure."""
        return self._quantile(0.5)

    @property
    def theory(self) -> List[float]:
        return [theory_dimension(a, self.t) for a in self.alphas]

    def rows(self) -> List[Dict[str, Any]]:
        med, q25, q75 = self._quantile(0.5), self._quantile(0.25), self._quantile(0.75)
        zeros = self.zero_counts
        rows = []
        for i, a in enumerate(self.alphas):
            for j, n in enumerate(self.n_values):
                rows.append({
                    "alpha": a,
                    "N": n,
                    "replica_count": self.replica_count,
                    "median_dim": med[i, j],
                    "q25": q25[i, j],
                    "q75": q75[i, j],
                    "theory_dim": self.theory[i],
                    "zero_measure_count": int(zeros[i, j]),
                })
        return rows

    def smoothed_rows(self) -> List[Dict[str, Any]]:
        rows = []
        for i, a in enumerate(self.alphas):
            for j, n in enumerate(self.n_values):
                rows.append({
                    "alpha": a,
                    "N": n,
                    "median_lower": float(np.median(self.lower[:, i, j])),
                    "median_measure": float(np.median(self.measures[:, i, j])),
                    "median_upper": float(np.median(self.upper[:, i, j])),
                })
        return rows

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "alphas": self.alphas,
            "n_values": self.n_values,
            "rows": self.rows(),
            "smoothed": self.smoothed_rows(),
            "warnings": self.warnings,
        }


@dataclass
class IslandReport:
    scan: IslandScan
    sup: SupGrowthCurve
    tail: Optional[TailFit]
    nonpositive: int

    def to_dict(self) -> dict:
        return {
            "scan": self.scan.to_dict(),
            "sup_growth": self.sup.to_dict(),
            "tail": self.tail.to_dict() if self.tail else None,
            "nonpositive_replicas": self.nonpositive,
        }


def validate_alphas(alphas: Sequence[float], t: float) -> None:
    bad = [a for a in alphas if not d_alpha(a, t) < 0.5]
    if bad:
        raise PreconditionError(
            f"alpha values {bad} violate d(alpha) < 1/2 at t={t:g}; "
            "the dimension formula holds only whenever d(alpha) < 1/2"
        )


def pam_kernel() -> KernelSpec:
    return KernelSpec.white_noise(1)


def block_reducer(alphas: Sequence[float], n_values: Sequence[float], a_values: Sequence[float],
                  window: Window, pool_cells: bool, grid: Grid):
    """Per-block reduction of PAM fields to island, sup and tail summaries."""

    def reduce(block: int, t: float, values: np.ndarray) -> Dict[str, Any]:
        f = SolutionField(grid, t, values)
        shape = (f.replicas, len(alphas), len(n_values))
        measures, lower, upper = np.empty(shape), np.empty(shape), np.empty(shape)
        for i, a in enumerate(alphas):
            for j, n in enumerate(n_values):
                m = smoothed_island_measure(f, a, n)
                measures[:, i, j], lower[:, i, j], upper[:, i, j] = m.raw, m.lower, m.upper
        tail_source = values if pool_cells else f.at_cell(0)
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = np.log(tail_source)
        return {
            "measures": measures,
            "lower": lower,
            "upper": upper,
            "sup": sup_statistics(f, n_values, window),
            "tail_counts": tail_counts(logs, a_values),
            "tail_samples": int(np.size(tail_source)),
            "nonpositive": len(nonpositive_replicas(f)),
        }

    return reduce


async def scan_async(grid: Grid, t: float, alphas: Sequence[float], N_values: Sequence[float],
                     replicas: int, seed: int, a_values: Sequence[float] = (),
                     window: Window = Window.HALF, pool_cells: bool = False,
                     threads: int = 1, batch_size: int = DEFAULT_BATCH_SIZE,
                     scheme: Scheme = Scheme.EXP_EULER_LATTICE, progress=None) -> IslandReport:
    """Island scan, sup growth and tail fit from one PAM ensemble."""
    if grid.d != 1:
        raise PreconditionError("island scans are defined for d = 1, space-time white noise and linear sigma")
    validate_alphas(alphas, t)
    n_values = sorted(float(n) for n in N_values)
    if n_values[0] <= 1:
        raise DomainError(f"window lengths must exceed 1 for log N scaling, got N={n_values[0]:g}")
    if n_values[-1] > grid.length:
        raise PreconditionError(f"N={n_values[-1]:g} exceeds the torus length {grid.length:g}")
    reducer = block_reducer(list(alphas), n_values, list(a_values), Window(window), pool_cells, grid)
    run = await solve_async(
        grid, pam_kernel(), SigmaSpec.linear(), t, None, replicas, seed,
        scheme=scheme, batch_size=batch_size, threads=threads, keep_fields=False,
        reducer=reducer, progress=progress,
    )
    reduced = run.snapshots[-1].reduced

    def stack(key: str) -> np.ndarray:
        return np.concatenate([r[key] for r in reduced], axis=0)

    warnings = list(run.warnings)
    nonpositive = sum(r["nonpositive"] for r in reduced)
    if nonpositive:
        message = f"{nonpositive} replicas reached a nonpositive cell; refine dx"
        logger.warning(message)
        warnings.append(message)
    thresholds = np.array([[threshold(a, n) for n in n_values] for a in alphas])
    scan = IslandScan(run.snapshots[-1].t, list(alphas), n_values, thresholds,
                      stack("measures"), stack("lower"), stack("upper"), replicas, warnings)
    zero = int(scan.zero_counts.sum())
    if zero:
        logger.info("%d (alpha, N, replica) points with zero island measure excluded from medians", zero)
    sup = curve_from_statistics(scan.t, n_values, stack("sup"), window)
    tail = None
    if a_values:
        counts = np.sum([r["tail_counts"] for r in reduced], axis=0)
        samples = sum(r["tail_samples"] for r in reduced)
        tail = fit_tail(scan.t, list(a_values), counts, samples)
    return IslandReport(scan, sup, tail, nonpositive)


def dimension_scan(grid: Grid, t: float, alphas: Sequence[float], N_values: Sequence[float],
                   replicas: int, seed: int, **kwargs) -> IslandScan:
    """Synchronous island scan; see :func:`scan_async` for options."""
    report = anyio.run(functools.partial(scan_async, grid, t, alphas, N_values, replicas, seed, **kwargs))
    return report.scan
