"""Integrability conditions on base kernels h.

The classes G_p and F_p ask whether

    int_0^1 ( ||h||_{L^p(B_r)} ||h||_{L^q(B_r^c)} + ||h||^2_{L^2(B_r^c)} ) w(r) dr < inf

with w = omega_d for G_p and w(r) = r^{d-1} for F_p. Parametric families
are decided exactly from small-r exponents; the truncated integral on
[eps, 1] is reported next to the decision.
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Iterable, List, Optional

import numpy as np

from common.errors import DomainError, UnsupportedSpecError

from .analytic import omega_d, sphere_area
from .base import BaseKernel, GaussianKernel, IndicatorKernel, PowerKernel, base_kernel
from .correlation import ball_overlap, correlation_of
from .radial import QuadEstimate, piecewise_quad, quad, radial_convolve, radial_integral
from .spec import Family, KernelSpec

logger = logging.getLogger(__name__)

DEFAULT_EPS = 1e-3


def conjugate(p: float) -> float:
    if not p > 1:
        raise DomainError(f"p must exceed 1, got {p}")
    return math.inf if math.isinf(p) else p / (p - 1)


def default_p(spec: KernelSpec) -> float:
    """An exponent p at which every norm in the bracket is finite, when one exists.

    For PowerH this is the midpoint of (1, p_max) with
    p_max = min(2d / (d + alpha), 2d / (d - beta) if beta < d).
    """
    if spec.family != Family.POWER_H:
        return 2.0
    d, alpha, beta = spec.d, spec.params["alpha"], spec.params["beta"]
    if alpha >= d:
        return 2.0
    p_max = 2 * d / (d + alpha)
    if beta < d:
        p_max = min(p_max, 2 * d / (d - beta))
    return 0.5 * (1.0 + p_max)


def f_from_h(spec: KernelSpec, x, tol: float = 1e-6) -> QuadEstimate:
    """(h * h~)(x) for a (possibly signed) radial base kernel."""
    kernel = base_kernel(spec)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    r = float(np.linalg.norm(x))
    if isinstance(kernel, IndicatorKernel):
        return QuadEstimate(float(ball_overlap(r, kernel.radius, spec.d)))
    if isinstance(kernel, GaussianKernel):
        return QuadEstimate(float(correlation_of(spec).density(r)))
    if isinstance(kernel, PowerKernel):
        if r == 0:
            # f(0) = ||h||_2^2 diverges at the origin
            return QuadEstimate(math.inf)
        if kernel.alpha >= spec.d:
            return QuadEstimate(math.inf)
    est = radial_convolve(
        lambda s: float(kernel.value(s)),
        lambda s: float(kernel.value(s)),
        r, spec.d, kernel.breakpoints,
        shell_integral=kernel.shell_moment if isinstance(kernel, PowerKernel) else None,
    )
    if est.flagged or est.error > max(tol * abs(est.value), 1e-12):
        est.flagged = True
        logger.warning("f_from_h(%s) at |x|=%g flagged: estimate %g +- %g", spec.label(), r, est.value, est.error)
    return est


# =============================================================================
# Exponent analysis
# =============================================================================

@dataclass
class ConditionExponents:
    """Small-r behaviour of the bracket for one exponent p."""

    p: float
    q: float
    inner_lp_finite: bool
    outer_lq_finite: bool
    outer_l2_finite: bool
    #: bracket ~ r^-bracket_exponent as r -> 0; None when a norm is infinite
    bracket_exponent: Optional[float]
    gp: Optional[bool]
    fp: Optional[bool]

    def to_dict(self) -> dict:
        return asdict(self)


def _weight_decision(e: float, d: int, weight: str) -> bool:
    # int_0^1 r^-e w(r) dr converges iff e < 1 + (exponent of w)
    if weight == "fp":
        return e < d
    return e < (1.0 if d == 1 else 2.0)


def _require_h(spec: KernelSpec) -> BaseKernel:
    if not spec.is_h:
        raise UnsupportedSpecError(f"{spec.family.value} describes a correlation f; conditions need a base kernel h")
    return base_kernel(spec)


def condition_exponents(spec: KernelSpec, p: Optional[float] = None) -> ConditionExponents:
    kernel = _require_h(spec)
    p = default_p(spec) if p is None else p
    q = conjugate(p)
    d = spec.d
    if spec.family == Family.TABLE_H:
        return ConditionExponents(p, q, True, True, True, None, None, None)
    if isinstance(kernel, PowerKernel):
        a, b = kernel.small_exponent, kernel.tail_exponent
        inner = p * a < d
        outer_q = math.isinf(q) or q * b > d
        outer_2 = 2 * b > d
        finite = inner and outer_q and outer_2
        e = kernel.alpha if finite else None
    else:
        inner = outer_q = outer_2 = True
        e = 0.0
    if e is None:
        return ConditionExponents(p, q, inner, outer_q, outer_2, None, False, False)
    return ConditionExponents(
        p, q, inner, outer_q, outer_2, e,
        _weight_decision(e, d, "gp"), _weight_decision(e, d, "fp"),
    )


def bracket(kernel: BaseKernel, p: float, r: float) -> float:
    """||h||_{L^p(B_r)} ||h||_{L^q(B_r^c)} + ||h||^2_{L^2(B_r^c)}"""
    q = conjugate(p)
    outer_q = kernel.lp_outside(q, r) if not math.isinf(q) else float(kernel.abs_value(r))
    return kernel.lp_inside(p, r) * outer_q + kernel.lp_outside(2.0, r) ** 2


def _weight(d: int, weight: str):
    if weight == "gp":
        return lambda r: omega_d(d, r)
    if weight == "fp":
        return lambda r: r ** (d - 1)
    raise DomainError(f"weight must be 'gp' or 'fp', got {weight!r}")


def condition_integral(spec: KernelSpec, p: Optional[float] = None, weight: str = "gp",
                       eps: float = DEFAULT_EPS) -> QuadEstimate:
    """Truncated bracket integral over [eps, 1]."""
    kernel = _require_h(spec)
    p = default_p(spec) if p is None else p
    if not 0 < eps < 1:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    w = _weight(spec.d, weight)
    breaks = [b for b in kernel.breakpoints if eps < b < 1]
    return quad(lambda r: bracket(kernel, p, r) * w(r), eps, 1.0, points=breaks)


def _check(spec: KernelSpec, p: Optional[float], weight: str) -> Optional[bool]:
    exps = condition_exponents(spec, p)
    decision = exps.gp if weight == "gp" else exps.fp
    if not decision:
        return decision
    truncated = condition_integral(spec, exps.p, weight)
    if not math.isfinite(truncated.value):
        return False
    return decision


def check_Gp(spec: KernelSpec, p: Optional[float] = None) -> Optional[bool]:
    """Membership of h in G_p; None when undecidable (tabulated h)."""
    return _check(spec, p, "gp")


def check_Fp(spec: KernelSpec, p: Optional[float] = None) -> Optional[bool]:
    """Membership of h in F_p; None when undecidable (tabulated h)."""
    return _check(spec, p, "fp")


# =============================================================================
# Positive-definiteness tail bounds
# =============================================================================

def pd_tail_bound(spec: KernelSpec, p: Optional[float] = None, r: float = 0.5) -> float:
    """2 ||h||_{L^p(B_r)} ||h||_{L^q(B_r^c)} + ||h||^2_{L^2(B_r^c)}"""
    kernel = _require_h(spec)
    p = default_p(spec) if p is None else p
    q = conjugate(p)
    return 2 * kernel.lp_inside(p, r) * kernel.lp_outside(q, r) + kernel.lp_outside(2.0, r) ** 2


def pd_tail_sup(spec: KernelSpec, r: float = 0.5, n: int = 33) -> float:
    """sup over |x| > 2r of f_bar = |h| * |h~|, scanned on a geometric grid."""
    _require_h(spec)
    corr = correlation_of(spec)
    radii = np.geomspace(2 * r * (1 + 1e-9), 2 * r * 1e2, n)
    return float(np.max(corr.density(radii)))


def pd_integral_ratio(spec: KernelSpec, p: Optional[float] = None, r: float = 0.5) -> float:
    """int_{B_r} f_bar divided by int_0^{2r} s^{d-1} bracket(s) ds."""
    kernel = _require_h(spec)
    p = default_p(spec) if p is None else p
    d = spec.d
    numerator = correlation_of(spec).ball_mass(r).value
    denominator = piecewise_quad(
        lambda s: s ** (d - 1) * bracket(kernel, p, s), kernel.breakpoints, upper=2 * r
    ).value
    if denominator == 0:
        return math.inf
    return numerator / denominator


def fit_pd_integral_constant(specs: Iterable[KernelSpec], radii=(0.25, 0.5, 1.0)) -> float:
    """Largest observed ratio across specs and radii; frozen by callers."""
    ratios: List[float] = [pd_integral_ratio(s, None, r) for s in specs for r in radii]
    return max(ratios)


# =============================================================================
# H_{-1}
# =============================================================================

@dataclass
class HMinus1:
    #: int_{B_1} |x|^{-d+1} omega_d(|x|) f_bar(x) dx
    potential_form: float
    #: (int |h_hat|^2 / (1 + |z|^2) dz)^{1/2}, when h_hat is known
    spectral_norm: Optional[float] = None

    @property
    def finite(self) -> bool:
        return math.isfinite(self.potential_form)

    def to_dict(self) -> dict:
        return asdict(self)


def h_minus1_norm(spec: KernelSpec) -> HMinus1:
    kernel = _require_h(spec)
    corr = correlation_of(spec)
    d = spec.d
    a0 = corr.density_small_exponent
    finite = a0 < (1.0 if d == 1 else 2.0)
    if not finite:
        potential = math.inf
    else:
        potential = sphere_area(d) * piecewise_quad(
            lambda r: omega_d(d, r) * float(corr.density(r)),
            [b for b in corr.breakpoints if b < 1], upper=1.0,
        ).value
    spectral = None
    if kernel.has_fourier and spec.family != Family.TABLE_H:
        spectral = math.sqrt(
            radial_integral(lambda rho: float(kernel.fourier(rho)) ** 2 / (1 + rho ** 2), d).value
        )
    return HMinus1(potential, spectral)
