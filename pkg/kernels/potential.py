"""Potential-theoretic integrals: Dalang's condition and the threshold Lambda_h.

Two forms of Dalang's integral are computed:

- spectral: int f_hat(dz) / (lambda + |z|^2);
- potential: int v_lambda(x) f(dx).

Since v_lambda_hat(z) = 2 / (2 lambda + |z|^2), they satisfy
potential(lambda) = 2 (2 pi)^{-d} spectral(2 lambda).
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from common.errors import DomainError, PreconditionError

from .analytic import potential_kernel_fourier, potential_kernel_radial, sphere_area
from .conditions import check_Gp
from .correlation import Correlation, correlation_of
from .radial import QuadEstimate
from .spec import Family, KernelSpec

logger = logging.getLogger(__name__)

LAMBDA_BRACKET = (1e-6, 1e6)
BISECTION_STEPS = 60


@dataclass
class DalangIntegral:
    lam: float
    finite: bool
    spectral: Optional[float] = None
    potential: Optional[float] = None
    flagged: bool = False

    @property
    def value(self) -> float:
        if not self.finite:
            return math.inf
        return self.spectral if self.spectral is not None else self.potential

    @property
    def normalization_ratio(self) -> Optional[float]:
        """potential(lambda) / spectral(lambda); differs from 1 by the transform convention."""
        if self.spectral and self.potential is not None and self.finite:
            return self.potential / self.spectral
        return None

    def to_dict(self) -> dict:
        data = asdict(self)
        data["value"] = self.value
        return data


def dalang_finite(corr: Correlation) -> bool:
    """Exact convergence of int v_lambda(x) f(dx) from the small-r structure.

    v_lambda is bounded in d=1, logarithmic in d=2 and ~ 1/r in d=3, and
    decays exponentially, so only the origin matters.
    """
    d = corr.d
    if corr.delta_weight and d >= 2:
        return False
    if corr.has_density:
        limit = 1.0 if d == 1 else 2.0
        if corr.density_small_exponent >= limit:
            return False
    return True


def _potential_scales(lam: float) -> Tuple[float, ...]:
    length = 1.0 / math.sqrt(2 * lam)
    return (length, 10 * length, 40 * length)


def potential_integral(spec_or_corr, lam: float) -> QuadEstimate:
    """int v_lambda(x) f_bar(dx); +inf when it diverges."""
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    corr = spec_or_corr if isinstance(spec_or_corr, Correlation) else correlation_of(spec_or_corr)
    if not dalang_finite(corr):
        return QuadEstimate(math.inf)
    d = corr.d
    return corr.integrate_against(
        lambda r: float(potential_kernel_radial(lam, r, d)),
        lambda z: float(potential_kernel_fourier(lam, z)),
        _potential_scales(lam),
    )


def spectral_dalang(corr: Correlation, spec: KernelSpec, lam: float) -> Optional[QuadEstimate]:
    """int f_hat(dz) / (lambda + |z|^2) when f_hat is known; None otherwise."""
    d = corr.d
    if spec.family == Family.WHITE_NOISE:
        return QuadEstimate(math.pi / math.sqrt(lam) if d == 1 else math.inf)
    if spec.family == Family.RIESZ_F:
        gamma = spec.params["gamma"]
        if gamma >= 2:
            return QuadEstimate(math.inf)
        const = corr.spectral_density(1.0)
        return QuadEstimate(
            float(const) * sphere_area(d) * lam ** (gamma / 2 - 1) * math.pi / (2 * math.sin(math.pi * gamma / 2))
        )
    if not (corr.has_spectral_density or (corr.cosines and not corr.has_density and not corr.delta_weight)):
        return None
    if corr.has_spectral_density:
        tail = corr.spectral_tail_exponent
        # integrand rho^{d-1} f_hat / rho^2 must decay faster than 1/rho
        if tail is not None and tail <= d - 2:
            return QuadEstimate(math.inf)
        if corr.spectral_small_exponent >= d:
            return QuadEstimate(math.inf)
    return corr.spectral_integral(lambda rho: 1.0 / (lam + rho ** 2))


def dalang_integral(spec: KernelSpec, lam: float = 1.0) -> DalangIntegral:
    """Dalang's integral in spectral and potential form (both when computable)."""
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    corr = correlation_of(spec)
    finite = dalang_finite(corr)
    if not finite:
        return DalangIntegral(lam, False, math.inf if spec.has_spectral_density else None, math.inf)
    spectral = spectral_dalang(corr, spec, lam)
    potential = potential_integral(corr, lam)
    flagged = potential.flagged or bool(spectral and spectral.flagged)
    if flagged:
        logger.warning("Dalang quadrature flagged for %s at lambda=%g", spec.label(), lam)
    return DalangIntegral(
        lam, True,
        spectral.value if spectral is not None else None,
        potential.value,
        flagged,
    )


# =============================================================================
# Lambda_h
# =============================================================================

def lambda_threshold(spec: KernelSpec, delta: float,
                     bracket: Tuple[float, float] = LAMBDA_BRACKET,
                     steps: int = BISECTION_STEPS) -> float:
    """Lambda_h(delta) = inf{lambda > 0 : int v_lambda (|h| * |h~|) < delta}.

    Bisection in log(lambda); the integral is nonincreasing in lambda. The
    upper end of the final bracket is returned, so the integral there is
    strictly below delta. Returns +inf when no lambda in the bracket works.
    """
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")
    if not spec.is_h:
        raise PreconditionError(f"lambda_threshold needs a base kernel h, got {spec.family.value}")
    gp = check_Gp(spec)
    if gp is False:
        raise PreconditionError(f"{spec.label()} is not in G_p for any admissible p")
    if gp is None:
        logger.warning("G_p membership of %s is undecided; computing Lambda_h anyway", spec.label())

    corr = correlation_of(spec)

    def integral(lam: float) -> float:
        return potential_integral(corr, lam).value

    lo, hi = bracket
    if integral(hi) >= delta:
        return math.inf
    if integral(lo) < delta:
        logger.warning("Lambda_h(%g) lies below the bracket start %g", delta, lo)
        return lo
    log_lo, log_hi = math.log(lo), math.log(hi)
    for _ in range(steps):
        mid = 0.5 * (log_lo + log_hi)
        if integral(math.exp(mid)) < delta:
            log_hi = mid
        else:
            log_lo = mid
    return math.exp(log_hi)


def lambda_table(spec: KernelSpec, deltas: Sequence[float]) -> List[Tuple[float, float]]:
    return [(float(delta), lambda_threshold(spec, delta)) for delta in deltas]
