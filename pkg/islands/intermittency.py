"""Island statistics for the parabolic Anderson model in d = 1.

Thresholds are a_N = exp((alpha log_+ N)^{2/3}); islands are the cells of
[0, N] where u(t, .) exceeds a_N. Everything here acts on a batch of
replica fields and returns one value per replica.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np

from common.errors import DomainError, PreconditionError
from solver.field import SolutionField, resolve_field

logger = logging.getLogger(__name__)

MIN_TAIL_COUNT = 30
MIN_TAIL_SAMPLES = 10_000


class Window(str, Enum):
    HALF = "half"            # [0, N]
    SYMMETRIC = "symmetric"  # [-N, N]


def d_alpha(alpha: float, t: float) -> float:
    """4 alpha 3^{-3/2} sqrt(6 / t)."""
    if not alpha > 0 or not t > 0:
        raise DomainError(f"alpha and t must be positive, got alpha={alpha}, t={t}")
    return 4 * alpha * 3 ** -1.5 * math.sqrt(6 / t)


def theory_dimension(alpha: float, t: float) -> float:
    return 1.0 - d_alpha(alpha, t)


def max_alpha(t: float) -> float:
    """Largest alpha with d(alpha) < 1/2 (exclusive)."""
    return 0.5 / d_alpha(1.0, t)


def sup_constant(t: float) -> float:
    """(3/4)(2t/3)^{2/3}, the almost-sure limit of sup log u / (log N)^{2/3}."""
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    return 0.75 * (2 * t / 3) ** (2 / 3)


def threshold(alpha: float, N: float) -> float:
    log_plus = max(math.log(N), 0.0) if N > 0 else 0.0
    return math.exp((alpha * log_plus) ** (2 / 3))


def _require_pam_field(field_: SolutionField, N: float) -> int:
    grid = field_.grid
    if grid.d != 1:
        raise PreconditionError("island statistics are defined for d = 1 only")
    n = grid.cells_for(N)
    if n > grid.n_cells:
        raise PreconditionError(f"N={N:g} exceeds the torus length {grid.length:g}")
    return n


def window_values(field_: SolutionField, N: float, window: Window = Window.HALF) -> np.ndarray:
    """Replica values on [0, N] or [-N, N] (wrapping around the torus)."""
    n = _require_pam_field(field_, N)
    values = field_.values
    if Window(window) == Window.HALF:
        return values[:, :n]
    if 2 * n + 1 > field_.grid.n_cells:
        raise PreconditionError(f"[-N, N] with N={N:g} does not fit on the torus")
    idx = np.arange(-n, n + 1) % field_.grid.n_cells
    return values[:, idx]


def island_measure(field_: SolutionField, alpha: float, N: float) -> np.ndarray:
    """Lebesgue measure of {x in [0, N]: u(t, x) > a_N} per replica."""
    inside = window_values(field_, N)
    return field_.grid.dx * np.count_nonzero(inside > threshold(alpha, N), axis=1).astype(float)


@dataclass
class SmoothedMeasure:
    """Measures of 1-Lipschitz minorant g_N and majorant G_N of the level-set indicator."""

    lower: np.ndarray
    raw: np.ndarray
    upper: np.ndarray


def smoothed_island_measure(field_: SolutionField, alpha: float, N: float) -> SmoothedMeasure:
    """g_N(z) = 1 ^ (z - a_N)_+ and G_N(z) = 1 ^ (z - a_N + 1)_+ integrated over [0, N]."""
    inside = window_values(field_, N)
    a = threshold(alpha, N)
    dx = field_.grid.dx
    lower = dx * np.clip(inside - a, 0.0, 1.0).sum(axis=1)
    upper = dx * np.clip(inside - a + 1.0, 0.0, 1.0).sum(axis=1)
    raw = dx * np.count_nonzero(inside > a, axis=1).astype(float)
    return SmoothedMeasure(lower, raw, upper)


def nonpositive_replicas(field_: SolutionField) -> List[int]:
    """Replicas with a cell <= 0; empty for a positive PAM field."""
    flat = field_.values.reshape(field_.replicas, -1)
    return np.nonzero(flat.min(axis=1) <= 0)[0].tolist()


# =============================================================================
# Sup growth
# =============================================================================

@dataclass
class SupGrowthCurve:
    t: float
    n_values: List[float]
    window: str
    #: max of log u over the window, replicas x N; nondecreasing along N
    running_max: np.ndarray
    #: running_max / (log N)^{2/3}
    normalized: np.ndarray
    theory: float

    @property
    def medians(self) -> List[float]:
        return np.median(self.normalized, axis=0).tolist()

    def rows(self) -> List[dict]:
        return [
            {"N": n, "median": m, "theory": self.theory, "replica_count": self.normalized.shape[0]}
            for n, m in zip(self.n_values, self.medians)
        ]

    def to_dict(self) -> dict:
        return {"t": self.t, "window": self.window, "rows": self.rows()}


def sup_statistics(field_: SolutionField, N_values: Sequence[float], window: Window = Window.HALF) -> np.ndarray:
    """Running max of log u over growing windows, replicas x N."""
    n_values = sorted(N_values)
    out = np.empty((field_.replicas, len(n_values)))
    with np.errstate(divide="ignore", invalid="ignore"):
        for j, N in enumerate(n_values):
            out[:, j] = np.log(window_values(field_, N, window).max(axis=1))
    return np.maximum.accumulate(out, axis=1)


def sup_growth(run, t: Optional[float], N_values: Sequence[float],
               window: Window = Window.HALF) -> SupGrowthCurve:
    field_ = resolve_field(run, t)
    n_values = sorted(float(n) for n in N_values)
    running = sup_statistics(field_, n_values, window)
    return curve_from_statistics(field_.t, n_values, running, window)


def curve_from_statistics(t: float, n_values: Sequence[float], running: np.ndarray,
                          window: Window = Window.HALF) -> SupGrowthCurve:
    scale = np.array([max(math.log(n), 1e-12) ** (2 / 3) for n in n_values])
    return SupGrowthCurve(t, list(n_values), Window(window).value, running, running / scale, sup_constant(t))


# =============================================================================
# Tail exponent
# =============================================================================

@dataclass
class TailFit:
    t: float
    a_values: List[float]
    probabilities: List[float]
    counts: List[int]
    samples: int
    slope: float
    slope_stderr: float
    theory: float
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "a_values": self.a_values,
            "probabilities": self.probabilities,
            "counts": self.counts,
            "samples": self.samples,
            "slope": self.slope,
            "slope_stderr": self.slope_stderr,
            "theory": self.theory,
            "warnings": self.warnings,
        }


def tail_counts(log_values: np.ndarray, a_values: Sequence[float]) -> np.ndarray:
    flat = np.asarray(log_values, dtype=float).ravel()
    return np.array([np.count_nonzero(flat > a) for a in a_values], dtype=np.int64)


def fit_tail(t: float, a_values: Sequence[float], counts: Sequence[int], samples: int,
             min_count: int = MIN_TAIL_COUNT) -> TailFit:
    """Least-squares slope of log P{u > e^a} against a^{3/2}."""
    if samples < MIN_TAIL_SAMPLES:
        raise PreconditionError(f"tail_exponent needs >= {MIN_TAIL_SAMPLES} samples, got {samples}")
    warnings: List[str] = []
    keep = [(a, int(c)) for a, c in zip(a_values, counts) if c >= min_count and a > 0]
    if len(keep) < len(a_values):
        message = f"tail a-range truncated to {len(keep)} of {len(a_values)} values with >= {min_count} exceedances"
        logger.warning(message)
        warnings.append(message)
    if len(keep) < 2:
        raise PreconditionError("fewer than two a-values with enough tail exceedances")
    a = np.array([k[0] for k in keep])
    c = np.array([k[1] for k in keep], dtype=float)
    prob = c / samples
    x = a ** 1.5
    if len(keep) > 3:
        coeffs, cov = np.polyfit(x, np.log(prob), 1, cov=True)
        slope_err = float(math.sqrt(cov[0, 0]))
    else:
        coeffs = np.polyfit(x, np.log(prob), 1)
        slope_err = math.nan
    return TailFit(t, a.tolist(), prob.tolist(), c.astype(int).tolist(), samples,
                   float(coeffs[0]), slope_err, -d_alpha(1.0, t), warnings)


def tail_exponent(run, t: Optional[float], a_values: Sequence[float], pool_cells: bool = False,
                  min_count: int = MIN_TAIL_COUNT) -> TailFit:
    """Slope of log P{u(t, 0) > e^a} against a^{3/2}; theory value -d(1).

    With ``pool_cells`` every cell contributes (the field is stationary in x),
    otherwise only the cell at the origin.
    """
    field_ = resolve_field(run, t)
    values = field_.values if pool_cells else field_.at_cell(0)
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.log(values)
    counts = tail_counts(logs, a_values)
    return fit_tail(field_.t, list(a_values), counts, int(np.size(values)), min_count)
