"""Radial base kernels h.

Each class evaluates |h| pointwise, its L^p norms on balls and their
complements, and (when known) its Fourier transform. Small-r and tail
exponents drive the exact convergence decisions for parametric families.
"""

import math
from abc import ABC, abstractmethod
from typing import Optional, Tuple

import numpy as np
from scipy import special

from common.errors import UnsupportedSpecError

from .analytic import ball_volume, sphere_area
from .radial import QuadEstimate, piecewise_quad
from .spec import Family, KernelSpec


def _power_segment(k: float, lo: float, hi: float) -> float:
    """int_lo^hi rho^{k-1} d rho, allowing lo = 0 and hi = inf."""
    if hi <= lo:
        return 0.0
    if k == 0:
        if lo == 0 or math.isinf(hi):
            return math.inf
        return math.log(hi / lo)
    if lo == 0 and k < 0:
        return math.inf
    if math.isinf(hi):
        return -lo ** k / k if k < 0 else math.inf
    return (hi ** k - lo ** k) / k


class BaseKernel(ABC):
    """A radial base kernel h on R^d."""

    d: int
    #: |h(r)| ~ r^-small_exponent as r -> 0
    small_exponent: float = 0.0
    #: |h(r)| ~ r^-tail_exponent as r -> inf; None for compact or faster decay
    tail_exponent: Optional[float] = None
    breakpoints: Tuple[float, ...] = (1.0,)

    @abstractmethod
    def value(self, r):
        """h at distance r (vectorized)."""

    def abs_value(self, r):
        return np.abs(self.value(r))

    def fourier(self, rho) -> Optional[np.ndarray]:
        """h_hat at frequency modulus rho, or None when not available."""
        return None

    @property
    def has_fourier(self) -> bool:
        return False

    def _numeric_power(self, p: float, lo: float, hi: float) -> QuadEstimate:
        d = self.d
        return piecewise_quad(
            lambda r: r ** (d - 1) * float(self.abs_value(r)) ** p, self.breakpoints, upper=hi, lower=lo
        ).scaled(sphere_area(d))

    def power_mass(self, p: float, lo: float, hi: float) -> float:
        """int over lo <= |x| < hi of |h|^p."""
        return self._numeric_power(p, lo, hi).value

    def lp_inside(self, p: float, r: float) -> float:
        """||h||_{L^p(B_r)}"""
        return self.power_mass(p, 0.0, r) ** (1.0 / p)

    def lp_outside(self, p: float, r: float) -> float:
        """||h||_{L^p(B_r^c)}"""
        return self.power_mass(p, r, math.inf) ** (1.0 / p)


class PowerKernel(BaseKernel):
    """c |w|^{-(d+alpha)/2} inside the unit ball, c |z|^{-(d+beta)/2} outside."""

    def __init__(self, alpha: float, beta: float, c: float, d: int):
        self.alpha, self.beta, self.c, self.d = alpha, beta, c, d
        self.small_exponent = (d + alpha) / 2
        self.tail_exponent = (d + beta) / 2
        self.breakpoints = (1.0,)

    def value(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            inner = self.c * r ** (-self.small_exponent)
            outer = self.c * r ** (-self.tail_exponent)
        out = np.where(r < 1.0, inner, outer)
        return out if out.ndim else float(out)

    def power_mass(self, p: float, lo: float, hi: float) -> float:
        d = self.d
        inner = _power_segment(d - p * self.small_exponent, lo, min(hi, 1.0)) if lo < 1.0 else 0.0
        outer = _power_segment(d - p * self.tail_exponent, max(lo, 1.0), hi) if hi > 1.0 else 0.0
        return sphere_area(d) * self.c ** p * (inner + outer)

    def shell_moment(self, lo: float, hi: float) -> float:
        """int_lo^hi s h(s) ds in closed form."""
        inner = self.c * _power_segment(2.0 - self.small_exponent, lo, min(hi, 1.0)) if lo < 1.0 else 0.0
        outer = self.c * _power_segment(2.0 - self.tail_exponent, max(lo, 1.0), hi) if hi > 1.0 else 0.0
        return inner + outer

    @property
    def correlation_small_exponent(self) -> float:
        return self.alpha

    @property
    def correlation_tail_exponent(self) -> float:
        if self.beta < self.d:
            return self.beta
        if self.beta > self.d:
            return self.tail_exponent
        return float(self.d)


class IndicatorKernel(BaseKernel):
    """Indicator of the centered ball of diameter ``width``."""

    def __init__(self, width: float, d: int):
        self.width, self.d = width, d
        self.radius = width / 2
        self.breakpoints = (self.radius,)

    def value(self, r):
        out = (np.asarray(r, dtype=float) <= self.radius).astype(float)
        return out if out.ndim else float(out)

    def power_mass(self, p: float, lo: float, hi: float) -> float:
        hi = min(hi, self.radius)
        if hi <= lo:
            return 0.0
        return ball_volume(self.d, hi) - ball_volume(self.d, lo)

    @property
    def has_fourier(self) -> bool:
        return True

    def fourier(self, rho):
        rho = np.asarray(rho, dtype=float)
        R, d = self.radius, self.d
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (2 * math.pi * R / rho) ** (d / 2) * special.jv(d / 2, R * rho)
        return np.where(rho == 0, ball_volume(d, R), out)


class GaussianKernel(BaseKernel):
    """Centered Gaussian density with covariance scale^2 I."""

    def __init__(self, scale: float, d: int):
        self.scale, self.d = scale, d
        self.breakpoints = (scale, 4 * scale)

    def value(self, r):
        r = np.asarray(r, dtype=float)
        s2 = self.scale ** 2
        return (2 * math.pi * s2) ** (-self.d / 2) * np.exp(-(r ** 2) / (2 * s2))

    def power_mass(self, p: float, lo: float, hi: float) -> float:
        d, s2 = self.d, self.scale ** 2
        prefactor = (2 * math.pi * s2) ** (-p * d / 2) * sphere_area(d) * 0.5 * (2 * s2 / p) ** (d / 2)

        def lower_gamma(x: float) -> float:
            if math.isinf(x):
                return math.gamma(d / 2)
            return special.gammainc(d / 2, x) * math.gamma(d / 2)

        return prefactor * (lower_gamma(p * hi ** 2 / (2 * s2)) - lower_gamma(p * lo ** 2 / (2 * s2)))

    @property
    def has_fourier(self) -> bool:
        return True

    def fourier(self, rho):
        return np.exp(-self.scale ** 2 * np.asarray(rho, dtype=float) ** 2 / 2)


class TableKernel(BaseKernel):
    """Radial profile sampled at r = k dx, zero beyond the last sample."""

    def __init__(self, samples, dx: float, d: int):
        self.samples = np.asarray(samples, dtype=float)
        self.dx, self.d = dx, d
        self.nodes = dx * np.arange(self.samples.size)
        self.support = float(self.nodes[-1])
        self.breakpoints = tuple(np.linspace(0, self.support, min(self.samples.size, 16))[1:])

    def value(self, r):
        out = np.interp(np.asarray(r, dtype=float), self.nodes, self.samples, right=0.0)
        return out if np.ndim(out) else float(out)

    def power_mass(self, p: float, lo: float, hi: float) -> float:
        return super().power_mass(p, min(lo, self.support), min(hi, self.support))


def base_kernel(spec: KernelSpec) -> BaseKernel:
    """Build the radial base kernel for an h-spec."""
    p, d = spec.params, spec.d
    if spec.family == Family.POWER_H:
        return PowerKernel(p["alpha"], p["beta"], p["c"], d)
    if spec.family == Family.INDICATOR_H:
        return IndicatorKernel(p["width"], d)
    if spec.family == Family.GAUSSIAN_H:
        return GaussianKernel(p["scale"], d)
    if spec.family == Family.TABLE_H:
        return TableKernel(spec.samples, p["dx"], d)
    raise UnsupportedSpecError(f"{spec.family.value} describes a correlation f, not a base kernel h")
