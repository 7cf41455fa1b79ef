"""Picard iteration on a frozen noise path.

Iterate n + 1 solves the linear recursion

    u_{n+1}(t_{j+1}) = P (u_{n+1}(t_j) + sigma(u_n(t_j)) xi_j dt),

whose fixed point is the time-stepped solution driven by the same slices.
"""

import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np

from common.errors import DomainError
from kernels.spec import KernelSpec
from noise.grid import Grid
from noise.rng import DEFAULT_BATCH_SIZE

from .ensemble import plan_run
from .field import SolutionField
from .scheme import Scheme, apply_heat
from .sigma import SigmaSpec

logger = logging.getLogger(__name__)

#: iterations before non-contracting differences are reported
BURN_IN = 3


@dataclass
class PicardResult:
    field: SolutionField
    #: u_n(t, .) for n = 0..iterations
    iterates: List[np.ndarray]
    #: sup over the space-time path of |u_{n+1} - u_n|
    differences: List[float]
    warnings: List[str] = field(default_factory=list)

    @property
    def ratios(self) -> List[float]:
        d = self.differences
        return [d[i + 1] / d[i] if d[i] > 0 else 0.0 for i in range(len(d) - 1)]

    def to_dict(self) -> dict:
        return {
            "t": self.field.t,
            "differences": self.differences,
            "ratios": self.ratios,
            "warnings": self.warnings,
        }


def picard_solve(grid: Grid, kernel: KernelSpec, sigma: SigmaSpec, t: float, iterations: int,
                 seed: int = 0, replica: int = 0, scheme: Scheme = Scheme.EXP_EULER,
                 batch_size: int = DEFAULT_BATCH_SIZE, unsafe: bool = False, u0=1.0) -> PicardResult:
    """Picard iterates at horizon t for one replica.

    The noise slices are the ones :func:`solve` draws for the same
    (seed, batch_size, replica), so the iterates converge to that replica's
    time-stepped solution.
    """
    if iterations < 0:
        raise DomainError(f"iterations must be nonnegative, got {iterations}")
    plan = plan_run(grid, kernel, sigma, t, None, seed, scheme, batch_size, unsafe, u0)
    grid = plan.grid
    block, offset = plan.streams.block_of(replica)
    n_steps = plan.n_steps
    if plan.sigma.is_zero:
        noise = np.zeros((n_steps, *grid.shape))
    else:
        noise = np.stack([plan.noise(block, s, 1, offset).values[0] for s in range(n_steps)])
    start = SolutionField.initial(grid, 1, u0).values[0]

    # path[j] = u_n(t_j); u_0 is the initial data at every time
    path = np.broadcast_to(start, (n_steps + 1, *grid.shape)).copy()
    iterates = [path[-1].copy()]
    differences: List[float] = []
    for n in range(iterations):
        new = np.empty_like(path)
        new[0] = start
        for j in range(n_steps):
            drive = plan.sigma(path[j]) * noise[j] * grid.dt
            new[j + 1] = apply_heat((new[j] + drive)[None], grid, plan.factor)[0]
        differences.append(float(np.max(np.abs(new - path))))
        path = new
        iterates.append(path[-1].copy())

    warnings = list(plan.warnings)
    for i in range(BURN_IN - 1, len(differences) - 1):
        if differences[i] > 1e-14 and differences[i + 1] >= differences[i]:
            message = (f"Picard differences stopped contracting at iteration {i + 2} "
                       f"({differences[i]:.3g} -> {differences[i + 1]:.3g}); discretization may be too coarse")
            logger.warning(message)
            warnings.append(message)
            break
    field = SolutionField(grid, n_steps * grid.dt, path[-1][None].copy(), n_steps,
                          {"seed": seed, "replica": replica, "iterations": iterations})
    return PicardResult(field, iterates, differences, warnings)
