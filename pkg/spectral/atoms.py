"""Spectral atom detection through Cesaro and triangular averages.

The triangular smoother (I_N * I~_N * f)(0) with I_N = N^{-d} 1_{[0,N]^d}
converges to the spectral atom at the origin; the box and ball means
f([-N,N]^d)/(2N)^d and f(B_N)/|B_N| are reported alongside.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from common.decisions import SequenceVerdict, classify_sequence, loglog_slope
from common.errors import DomainError, UnsupportedSpecError
from kernels.analytic import ball_volume
from kernels.correlation import Correlation, correlation_of
from kernels.radial import QuadEstimate, piecewise_quad
from kernels.spec import KernelSpec

logger = logging.getLogger(__name__)

DEFAULT_SCALES = (2.0 ** 4, 2.0 ** 6, 2.0 ** 8, 2.0 ** 10)


class AtomDecision(str, Enum):
    ATOM_ZERO = "AtomZero"
    ATOM_POSITIVE = "AtomPositive"
    INCONCLUSIVE = "Inconclusive"


def _sinc2(w: float, N: float) -> float:
    """N^{-1} int_{-N}^{N} (1 - |x|/N) cos(w x) dx"""
    if w == 0:
        return 1.0
    half = w * N / 2
    return (math.sin(half) / half) ** 2


def _triangle_weight(rho: float, N: float, d: int) -> float:
    """int over the sphere of radius rho of prod_j (1 - |x_j|/N)_+, per unit rho^{d-1}."""
    if d == 2:
        if rho <= N:
            return 2 * math.pi - 8 * rho / N + 2 * rho ** 2 / N ** 2
        value, _ = integrate.quad(
            lambda th: max(1 - rho * math.cos(th) / N, 0.0) * max(1 - rho * math.sin(th) / N, 0.0),
            0.0, math.pi / 2,
        )
        return 4 * value
    value, _ = integrate.dblquad(
        lambda ph, th: math.sin(ph)
        * max(1 - rho * math.sin(ph) * math.cos(th) / N, 0.0)
        * max(1 - rho * math.sin(ph) * math.sin(th) / N, 0.0)
        * max(1 - rho * math.cos(ph) / N, 0.0),
        0.0, math.pi / 2, 0.0, math.pi / 2,
    )
    return 8 * value


def _triangular_density(corr: Correlation, N: float, modulation: float = 0.0) -> QuadEstimate:
    d = corr.d
    breaks = [b for b in corr.breakpoints if b < N]
    if d == 1:
        est = piecewise_quad(
            lambda r: float(corr.density(r)) * (1 - r / N) * math.cos(modulation * r), breaks, upper=N
        )
        return est.scaled(2.0 / N)
    if modulation:
        raise UnsupportedSpecError("Modulated averages are implemented for d = 1 only")
    est = piecewise_quad(
        lambda rho: rho ** (d - 1) * float(corr.density(rho)) * _triangle_weight(rho, N, d),
        sorted({*breaks, N}), upper=math.sqrt(d) * N,
    )
    return est.scaled(N ** (-d))


def triangular_smoother(spec: KernelSpec, N: float) -> float:
    """(I_N * I~_N * f)(0) = N^{-d} int f(x) prod_j (1 - |x_j|/N)_+ dx."""
    if not N > 0:
        raise DomainError(f"N must be positive, got {N}")
    corr = correlation_of(spec)
    d = corr.d
    total = corr.delta_weight * N ** (-d)
    for c in corr.cosines:
        total += c.amplitude * _sinc2(c.frequency, N)
    if corr.has_density:
        total += _triangular_density(corr, N).value
    return total


def modulated_triangular(spec: KernelSpec, N: float, frequency: float) -> float:
    """Triangular average of f(x) cos(frequency x_1); tends to the atom at +-frequency e_1."""
    corr = correlation_of(spec)
    d = corr.d
    total = corr.delta_weight * N ** (-d)
    for c in corr.cosines:
        total += 0.5 * c.amplitude * (_sinc2(c.frequency - frequency, N) + _sinc2(c.frequency + frequency, N))
    if corr.has_density:
        total += _triangular_density(corr, N, modulation=frequency).value
    return total


def box_mass(spec: KernelSpec, half_width: float) -> float:
    return correlation_of(spec).box_mass(half_width).value


def ball_mass(spec: KernelSpec, radius: float) -> float:
    return correlation_of(spec).ball_mass(radius).value


def cesaro_means(spec: KernelSpec, scales: Sequence[float] = DEFAULT_SCALES) -> Dict[str, List[float]]:
    """Box means f([-N,N]^d)/(2N)^d and ball means f(B_N)/|B_N|."""
    d = spec.d
    return {
        "box": [box_mass(spec, N) / (2 * N) ** d for N in scales],
        "ball": [ball_mass(spec, N) / ball_volume(d, N) for N in scales],
    }


def sandwich(spec: KernelSpec, N: float) -> Tuple[float, float, float]:
    """(2N)^{-d} f([-N/2,N/2]^d) <= triangular_smoother(N) <= N^{-d} f([-N,N]^d) for f >= 0."""
    d = spec.d
    return (
        box_mass(spec, N / 2) / (2 * N) ** d,
        triangular_smoother(spec, N),
        box_mass(spec, N) / N ** d,
    )


@dataclass
class AtomEstimate:
    n_values: List[float]
    cesaro_values: List[float]
    triangular_values: List[float]
    extrapolated_atom: float
    decision: AtomDecision
    ball_values: List[float] = field(default_factory=list)
    slope: Optional[float] = None

    def to_dict(self) -> dict:
        data = asdict(self)
        data["decision"] = self.decision.value
        return data


def extrapolate(scales: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares fit of a + b/N; returns a."""
    x = 1.0 / np.asarray(scales, dtype=float)
    y = np.asarray(values, dtype=float)
    design = np.vstack([np.ones_like(x), x]).T
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    return float(coef[0])


def atom_at_zero(spec: KernelSpec, scales: Sequence[float] = DEFAULT_SCALES) -> AtomEstimate:
    """Decide whether the spectral measure of f charges the origin."""
    scales = [float(N) for N in scales]
    if len(scales) < 3 or any(b <= a for a, b in zip(scales, scales[1:])):
        raise DomainError("atom_at_zero needs at least three increasing scales")
    triangular = [triangular_smoother(spec, N) for N in scales]
    means = cesaro_means(spec, scales)
    verdict = classify_sequence(scales, triangular)
    if verdict == SequenceVerdict.DECAYS:
        decision = AtomDecision.ATOM_ZERO
    elif verdict == SequenceVerdict.STABILIZES and triangular[-1] > 0:
        decision = AtomDecision.ATOM_POSITIVE
    else:
        decision = AtomDecision.INCONCLUSIVE
    atom = 0.0 if decision == AtomDecision.ATOM_ZERO else extrapolate(scales, triangular)
    if decision == AtomDecision.INCONCLUSIVE:
        logger.warning("Atom at zero of %s inconclusive: %s", spec.label(), triangular)
    return AtomEstimate(
        n_values=scales,
        cesaro_values=means["box"],
        triangular_values=triangular,
        extrapolated_atom=atom,
        decision=decision,
        ball_values=means["ball"],
        slope=loglog_slope(scales, triangular),
    )


def atom_at_frequency(spec: KernelSpec, frequency: float, scales: Sequence[float] = DEFAULT_SCALES) -> float:
    """Extrapolated spectral atom at frequency * e_1 (d = 1 densities)."""
    values = [modulated_triangular(spec, N, frequency) for N in scales]
    return extrapolate(scales, values)
