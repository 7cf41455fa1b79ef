"""Variance of spatial averages against the Poincare-type bound.

For a product of k 1-Lipschitz factors the variance of the average over
[0, N]^d is bounded by C k^2 f([-N, N]^d) / N^d. C is never given, so it
is fitted at the smallest N and frozen; what is tested is the N-dependence.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence


from common.aggregate import batch_means_variance_stderr, jackknife_variance_stderr
from common.errors import PreconditionError
from kernels.correlation import correlation_of
from kernels.spec import KernelSpec
from solver.field import resolve_field

from .functionals import AverageSpec, spatial_average

logger = logging.getLogger(__name__)

MIN_REPLICAS = 1000
#: stderr multiples added to the frozen bound before declaring a violation
BOUND_SLACK = 3.0
#: jackknife and batch-means stderr should agree to this relative tolerance
STDERR_AGREEMENT = 0.2
#: ratios Var / bound must stay within [1/BAND_FACTOR, BAND_FACTOR] of the smallest-N fit
BAND_FACTOR = 3.0


@dataclass
class PoincareCheck:
    n_values: List[float]
    variances: List[float]
    stderr: List[float]
    stderr_batch: List[float]
    #: f([-N, N]^d), or the |h| * |h~| mass for base kernels
    masses: List[float]
    bounds: List[float]
    ratios: List[float]
    constant: float
    #: no variance exceeds its frozen bound by more than BOUND_SLACK stderr
    passed: bool
    #: every ratio lies in [1/BAND_FACTOR, BAND_FACTOR]
    within_band: bool
    k: int
    g_family: str
    shift_id: str
    t: float
    d: int = 1
    warnings: List[str] = field(default_factory=list)

    def rows(self) -> List[Dict[str, object]]:
        return [
            {
                "N": n, "k": self.k, "g_family": self.g_family, "shift_id": self.shift_id,
                "var": v, "stderr": s, "bound": b, "ratio": r, "within_band": in_band(r),
            }
            for n, v, s, b, r in zip(self.n_values, self.variances, self.stderr, self.bounds, self.ratios)
        ]

    def scaled_variances(self) -> List[float]:
        """Var(A_N) N^d / (k^2 f([-N, N]^d)); roughly flat when the law holds."""
        return [
            v * n ** self.d / (self.k ** 2 * m) if m > 0 else math.inf
            for n, v, m in zip(self.n_values, self.variances, self.masses)
        ]

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "constant": self.constant,
            "passed": self.passed,
            "within_band": self.within_band,
            "scaled_variances": self.scaled_variances(),
            "rows": self.rows(),
            "warnings": self.warnings,
        }


def in_band(ratio: float) -> bool:
    return 1.0 / BAND_FACTOR <= ratio <= BAND_FACTOR


def correlation_mass(kernel: KernelSpec, N: float) -> float:
    """f([-N, N]^d) for correlations, (|h| * |h~|)([-N, N]^d) for base kernels."""
    return correlation_of(kernel).box_mass(N).value


def variance_vs_N(run, avg: AverageSpec, N_values: Sequence[float], kernel: KernelSpec,
                  t: Optional[float] = None, min_replicas: int = MIN_REPLICAS) -> PoincareCheck:
    """Ensemble variance of the spatial average at each N with the frozen bound.

    ``run`` is an EnsembleRun (the snapshot at ``t``, default the last) or a
    SolutionField holding the replicas.

    Raises:
        PreconditionError: with fewer than ``min_replicas`` replicas.
    """
    field_ = resolve_field(run, t)
    if field_.replicas < min_replicas:
        raise PreconditionError(f"variance_vs_N needs >= {min_replicas} replicas, got {field_.replicas}")
    n_values = sorted(float(n) for n in N_values)
    d = field_.grid.d
    variances, errs, errs_batch, masses, shapes = [], [], [], [], []
    warnings: List[str] = []
    for N in n_values:
        values = spatial_average(field_, avg, N)
        variances.append(float(values.var(ddof=1)))
        jk = jackknife_variance_stderr(values)
        bm = batch_means_variance_stderr(values)
        errs.append(jk)
        errs_batch.append(bm)
        if jk > 0 and abs(jk - bm) > STDERR_AGREEMENT * jk:
            warnings.append(f"N={N:g}: jackknife stderr {jk:.3g} and batch-means stderr {bm:.3g} disagree")
        mass = correlation_mass(kernel, N)
        masses.append(mass)
        shapes.append(avg.k ** 2 * mass / N ** d)
    constant = variances[0] / shapes[0] if shapes[0] > 0 else math.inf
    bounds = [constant * s for s in shapes]
    ratios = [v / b if b > 0 else math.inf for v, b in zip(variances, bounds)]
    passed = all(v <= b + BOUND_SLACK * e for v, b, e in zip(variances, bounds, errs))
    within_band = all(in_band(r) for r in ratios)
    if not within_band:
        shown = ", ".join(f"{r:.3g}" for r in ratios)
        warnings.append(f"{avg.label()}: Var(A_N) / bound left [1/{BAND_FACTOR:g}, {BAND_FACTOR:g}]: {shown}")
    for w in warnings:
        logger.warning(w)
    return PoincareCheck(
        n_values, variances, errs, errs_batch, masses, bounds, ratios, constant, passed, within_band,
        avg.k, avg.g_family, avg.shift_id, field_.t, d, warnings,
    )
