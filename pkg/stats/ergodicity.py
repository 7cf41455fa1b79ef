"""Variance-decay test for spatial ergodicity and covariance decay for mixing."""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import stats as sps

from common.decisions import SequenceVerdict, classify_sequence, loglog_slope
from common.errors import PreconditionError
from solver.field import resolve_field

from .functionals import AverageSpec, GFamily, LipschitzFactor, product_field, spatial_average

logger = logging.getLogger(__name__)

#: a stabilized variance must exceed this many stderr to count as positive
MIN_LEVEL_STDERR = 5.0


class ErgodicityVerdict(str, Enum):
    CONSISTENT = "ConsistentWithErgodic"
    INCONSISTENT = "Inconsistent"
    INCONCLUSIVE = "Inconclusive"


def default_suite(d: int = 1, shift: float = 1.0) -> List[AverageSpec]:
    """Five members covering k in {1, 2}, four g families and two shift patterns."""
    zero = (0.0,) * d
    moved = (shift,) + (0.0,) * (d - 1)
    ident = LipschitzFactor(GFamily.IDENTITY_MINUS_1)
    clip = LipschitzFactor(GFamily.CLIP01, 1.0)
    cos = LipschitzFactor(GFamily.COSINE, 1.0)
    sin = LipschitzFactor(GFamily.SINE, 1.0)
    return [
        AverageSpec((ident,), (zero,), "0"),
        AverageSpec((clip,), (zero,), "0"),
        AverageSpec((cos,), (moved,), "e1"),
        AverageSpec((clip, sin), (zero, moved), "0,e1"),
        AverageSpec((ident, cos), (zero, moved), "0,e1"),
    ]


def validate_suite(suite: Sequence[AverageSpec]) -> None:
    ks = {a.k for a in suite}
    families = {f.family for a in suite for f in a.factors}
    patterns = {a.shifts for a in suite}
    if not {1, 2} <= ks:
        raise PreconditionError("ergodicity suite must include products with k = 1 and k = 2")
    if len(families) < 3:
        raise PreconditionError("ergodicity suite must use at least 3 g families")
    if len(patterns) < 2:
        raise PreconditionError("ergodicity suite must use at least 2 shift patterns")


@dataclass
class MemberResult:
    label: str
    n_values: List[float]
    variances: List[float]
    stderr: List[float]
    verdict: SequenceVerdict
    positive_level: bool

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "n_values": self.n_values,
            "variances": self.variances,
            "stderr": self.stderr,
            "verdict": self.verdict.value,
            "positive_level": self.positive_level,
        }


@dataclass
class ErgodicityResult:
    verdict: ErgodicityVerdict
    members: List[MemberResult]
    threshold: float

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "threshold_stderr": self.threshold,
            "members": [m.to_dict() for m in self.members],
        }


def _variance_stderr(values: np.ndarray) -> float:
    # normal-theory stderr of the sample variance
    n = values.size
    return float(values.var(ddof=1) * math.sqrt(2.0 / (n - 1)))


def ergodicity_test(run, suite: Optional[Sequence[AverageSpec]] = None,
                    N_values: Sequence[float] = (), alpha: float = 0.01,
                    t: Optional[float] = None) -> ErgodicityResult:
    """Decide whether every suite member's variance vanishes as N grows.

    A stabilized variance counts as a positive level when it exceeds
    max(5, z_{1 - alpha/m}) standard errors, m being the suite size.
    """
    field_ = resolve_field(run, t)
    if suite is None:
        suite = default_suite(field_.grid.d, field_.grid.dx * 4)
    validate_suite(suite)
    if len(N_values) < 3:
        raise PreconditionError("ergodicity_test needs at least three window sizes")
    threshold = max(MIN_LEVEL_STDERR, float(sps.norm.ppf(1 - alpha / len(suite))))
    n_values = sorted(float(n) for n in N_values)
    members = []
    for avg in suite:
        variances, errs = [], []
        for N in n_values:
            values = spatial_average(field_, avg, N)
            variances.append(float(values.var(ddof=1)))
            errs.append(_variance_stderr(values))
        verdict = classify_sequence(n_values, variances)
        positive = verdict == SequenceVerdict.STABILIZES and variances[-1] > threshold * errs[-1]
        members.append(MemberResult(avg.label(), n_values, variances, errs, verdict, positive))
        logger.debug("%s: %s", avg.label(), verdict.value)
    if any(m.positive_level for m in members):
        verdict = ErgodicityVerdict.INCONSISTENT
    elif all(m.verdict == SequenceVerdict.DECAYS for m in members):
        verdict = ErgodicityVerdict.CONSISTENT
    else:
        verdict = ErgodicityVerdict.INCONCLUSIVE
    return ErgodicityResult(verdict, members, threshold)


# =============================================================================
# Mixing
# =============================================================================

@dataclass
class DecayCurve:
    lags: List[int]
    distances: List[float]
    covariance: List[float]
    stderr: List[float]
    slope: float

    def rows(self) -> List[Dict[str, float]]:
        return [
            {"lag": lag, "cov": c, "stderr": s}
            for lag, c, s in zip(self.lags, self.covariance, self.stderr)
        ]

    def to_dict(self) -> dict:
        return {"rows": self.rows(), "distances": self.distances, "slope": self.slope}


def covariance_decay(run, g: LipschitzFactor, lags: Sequence[int], t: Optional[float] = None) -> DecayCurve:
    """Cov[g(u(t, x)), g(u(t, x + lag e_1))] across replicas, averaged over base points.

    Lags are in cells and may not exceed a quarter of the torus.
    """
    field_ = resolve_field(run, t)
    grid = field_.grid
    if any(lag < 0 or lag > grid.n_cells // 4 for lag in lags):
        raise PreconditionError(f"lags must lie in [0, {grid.n_cells // 4}] cells")
    if field_.replicas < 2:
        raise PreconditionError("covariance_decay needs at least two replicas")
    avg = AverageSpec.single(g, grid.d)
    values = product_field(field_, avg)
    centered = values - values.mean(axis=0, keepdims=True)
    n = field_.replicas
    cov, err = [], []
    for lag in lags:
        shifted = np.roll(centered, -int(lag), axis=1)
        per_replica = (centered * shifted).mean(axis=grid.spatial_axes)
        cov.append(float(per_replica.mean() * n / (n - 1)))
        err.append(float(per_replica.std(ddof=1) / math.sqrt(n)))
    positive = [(lag * grid.dx, abs(c)) for lag, c in zip(lags, cov) if lag > 0]
    slope = loglog_slope([p[0] for p in positive], [p[1] for p in positive]) if positive else math.nan
    return DecayCurve(list(map(int, lags)), [lag * grid.dx for lag in lags], cov, err, slope)
