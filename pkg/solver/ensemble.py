"""Ensemble solver: independent replica blocks on a bounded worker pool."""

import functools
import logging
import math
import sys
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import anyio
import numpy as np

from common.aggregate import RunningMoments
from common.errors import DomainError, GateFailure, PreconditionError, unwrap_group
from kernels.conditions import check_Gp
from kernels.correlation import correlation_of
from kernels.potential import dalang_finite
from kernels.spec import KernelSpec
from noise.grid import Grid
from noise.rng import DEFAULT_BATCH_SIZE, RandomStreams
from noise.synthesis import ColoringPlan, coloring_plan, sample_white

from .field import EnsembleRun, SolutionField, Snapshot
from .scheme import Scheme, heat_factor, step
from .sigma import SigmaSpec

if sys.version_info < (3, 11):  # pragma: no cover
    from exceptiongroup import BaseExceptionGroup

logger = logging.getLogger(__name__)

#: reducer(block, t, values) -> any picklable summary of a block's fields
Reducer = Callable[[int, float, np.ndarray], Any]
#: progress(blocks_done, blocks_total)
ProgressHook = Callable[[int, int], None]


def gate_check(kernel: KernelSpec, unsafe: bool = False) -> List[str]:
    """Refuse kernels outside the well-posedness gate.

    Correlations need Dalang's condition; base kernels additionally need
    membership in G_p. An undecidable G_p check passes with a warning.

    Raises:
        GateFailure: when the gate fails and ``unsafe`` is not set.
    """
    warnings: List[str] = []
    problems: List[str] = []
    if not dalang_finite(correlation_of(kernel)):
        problems.append(f"{kernel.label()} fails Dalang's condition")
    if kernel.is_h:
        gp = check_Gp(kernel)
        if gp is False:
            problems.append(f"{kernel.label()} is not in G_p")
        elif gp is None:
            warnings.append(f"G_p membership of {kernel.label()} is undecided")
    if problems:
        message = "; ".join(problems)
        if not unsafe:
            raise GateFailure(message)
        warnings.append(f"gate skipped: {message}")
    for w in warnings:
        logger.warning(w)
    return warnings


@dataclass
class RunPlan:
    """Everything a worker needs to advance one block; shared read-only."""

    grid: Grid
    kernel: KernelSpec
    sigma: SigmaSpec
    scheme: Scheme
    n_steps: int
    snapshot_steps: Tuple[int, ...]
    streams: RandomStreams
    coloring: Optional[ColoringPlan]
    factor: np.ndarray
    u0: Any = 1.0
    keep_fields: bool = True
    reducer: Optional[Reducer] = None
    warnings: List[str] = field(default_factory=list)

    def noise(self, block: int, step_index: int, count: int, offset: int = 0):
        """Colored slice for replicas [offset, offset + count) of a block."""
        rng = self.streams.generator(block, step_index)
        white = sample_white(self.grid, rng, offset + count, (self.streams.seed, block, step_index))
        if offset:
            white.values = white.values[offset:]
        return self.coloring.apply(white)


def plan_run(grid: Grid, kernel: KernelSpec, sigma: SigmaSpec, t_final: float,
             snapshot_times: Optional[Sequence[float]] = None, seed: int = 0,
             scheme: Scheme = Scheme.EXP_EULER, batch_size: int = DEFAULT_BATCH_SIZE,
             unsafe: bool = False, u0=1.0, keep_fields: bool = True,
             reducer: Optional[Reducer] = None) -> RunPlan:
    """Validate inputs, fix the step count and snapshot steps, build the coloring plan."""
    if not t_final > 0:
        raise DomainError(f"t_final must be positive, got {t_final}")
    if kernel.d != grid.d:
        raise PreconditionError(f"Kernel dimension {kernel.d} does not match grid dimension {grid.d}")
    warnings = gate_check(kernel, unsafe)
    if grid.dt > grid.dx ** 2 / 2:
        message = f"dt={grid.dt:g} exceeds the accuracy guard dx^2/2={grid.dx ** 2 / 2:g}"
        if not unsafe:
            raise PreconditionError(message)
        warnings.append(message)
    n_steps = max(1, int(round(t_final / grid.dt)))
    dt = t_final / n_steps
    if not math.isclose(dt, grid.dt, rel_tol=1e-12):
        logger.info("dt adjusted from %g to %g to land on t_final=%g", grid.dt, dt, t_final)
        grid = grid.with_dt(dt)
    steps = {n_steps}
    for t in snapshot_times or ():
        if not 0 <= t <= t_final * (1 + 1e-12):
            raise DomainError(f"Snapshot time {t} outside [0, {t_final}]")
        s = int(round(t / dt))
        if not math.isclose(s * dt, t, rel_tol=1e-9, abs_tol=1e-12):
            message = f"snapshot time {t:g} snapped to {s * dt:g}"
            logger.warning(message)
            warnings.append(message)
        steps.add(s)
    coloring = None if sigma.is_zero else coloring_plan(grid, kernel)
    if coloring is not None:
        warnings.extend(coloring.warnings)
    return RunPlan(
        grid, kernel, sigma, Scheme(scheme), n_steps, tuple(sorted(steps)),
        RandomStreams(seed, batch_size), coloring, heat_factor(grid, scheme),
        u0, keep_fields, reducer, warnings,
    )


@dataclass
class BlockResult:
    block: int
    values: List[Optional[np.ndarray]]
    moments: List[RunningMoments]
    reduced: List[Any]


def run_block(plan: RunPlan, block: int, start: int, count: int) -> BlockResult:
    """Advance replicas [start, start + count) of one block to t_final."""
    grid = plan.grid
    field = SolutionField.initial(grid, count, plan.u0)
    wanted = set(plan.snapshot_steps)
    result = BlockResult(block, [], [], [])

    def record(f: SolutionField) -> None:
        result.moments.append(RunningMoments().update_batch(f.values))
        result.values.append(f.values.copy() if plan.keep_fields else None)
        if plan.reducer is not None:
            result.reduced.append(plan.reducer(block, f.t, f.values))

    if 0 in wanted:
        record(field)
    for s in range(plan.n_steps):
        noise = None if plan.sigma.is_zero else plan.noise(block, s, count)
        field = step(field, noise, plan.sigma, plan.scheme, plan.factor, start)
        if field.step_index in wanted:
            record(field)
    return result


def merge_blocks(plan: RunPlan, results: List[BlockResult], replicas: int) -> List[Snapshot]:
    """Combine block results in block order."""
    results = sorted(results, key=lambda r: r.block)
    snapshots = []
    for i, s in enumerate(plan.snapshot_steps):
        moments = RunningMoments()
        for r in results:
            moments = moments.merge(r.moments[i])
        field = None
        if plan.keep_fields:
            values = np.concatenate([r.values[i] for r in results], axis=0)
            field = SolutionField(plan.grid, s * plan.grid.dt, values, s)
        reduced = [r.reduced[i] for r in results] if plan.reducer is not None else []
        snapshots.append(Snapshot(s * plan.grid.dt, s, field, moments, reduced))
    return snapshots


async def solve_async(grid: Grid, kernel: KernelSpec, sigma: SigmaSpec, t_final: float,
                      snapshot_times: Optional[Sequence[float]] = None, replicas: int = 1,
                      seed: int = 0, scheme: Scheme = Scheme.EXP_EULER,
                      batch_size: int = DEFAULT_BATCH_SIZE, threads: int = 1,
                      unsafe: bool = False, u0=1.0, keep_fields: bool = True,
                      reducer: Optional[Reducer] = None,
                      progress: Optional[ProgressHook] = None) -> EnsembleRun:
    """Run an ensemble; blocks execute in worker threads and merge in block order.

    The result depends on (seed, batch_size) only, never on ``threads``.
    """
    if threads < 1:
        raise DomainError(f"threads must be positive, got {threads}")
    plan = plan_run(grid, kernel, sigma, t_final, snapshot_times, seed, scheme,
                    batch_size, unsafe, u0, keep_fields, reducer)
    blocks = plan.streams.blocks(replicas)
    limiter = anyio.CapacityLimiter(threads)
    results: Dict[int, BlockResult] = {}

    async def worker(block: int, start: int, count: int) -> None:
        results[block] = await anyio.to_thread.run_sync(
            functools.partial(run_block, plan, block, start, count), limiter=limiter
        )
        if progress is not None:
            progress(len(results), len(blocks))

    try:
        async with anyio.create_task_group() as tg:
            for block, start, count in blocks:
                tg.start_soon(worker, block, start, count)
    except BaseExceptionGroup as group:
        raise unwrap_group(group) from None

    snapshots = merge_blocks(plan, list(results.values()), replicas)
    provenance = {
        "kernel": kernel.to_dict(),
        "sigma": sigma.to_dict(),
        "seed": seed,
        "scheme": plan.scheme.value,
        "steps": plan.n_steps,
        "dt": plan.grid.dt,
        "batch_size": batch_size,
    }
    logger.info("Solved %d replicas of %s to t=%g in %d steps", replicas, kernel.label(), t_final, plan.n_steps)
    return EnsembleRun(plan.grid, replicas, seed, plan.scheme.value, snapshots, provenance, plan.warnings)


def solve(grid: Grid, kernel: KernelSpec, sigma: SigmaSpec, t_final: float,
          snapshot_times: Optional[Sequence[float]] = None, replicas: int = 1, seed: int = 0,
          **kwargs) -> EnsembleRun:
    """Synchronous wrapper around :func:`solve_async`."""
    return anyio.run(functools.partial(
        solve_async, grid, kernel, sigma, t_final, snapshot_times, replicas, seed, **kwargs
    ))
