"""Correlation measures f (and f_bar = |h| * |h~| for base kernels).

A correlation is split into three parts that every integral treats
separately:

- ``delta_weight``: coefficient of a point mass at the origin (white noise);
- ``cosines``: terms ``amplitude * cos(frequency * x_1)``, the purely atomic
  part of the spectral measure (constants are cosines of frequency 0);
- a radial ``density``.

Spectral atoms are reported in the averaging normalization: f = 1 has atom
1 at the origin, ``cos(x_1)`` has atoms 1/2 at +-e_1. The spectral measure
in the transform convention of ``kernels.analytic`` is (2 pi)^d times that.
"""

import functools
import logging
import math
import threading
from abc import ABC
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import integrate, special

from .analytic import ball_volume, sphere_area
from .base import BaseKernel, PowerKernel, TableKernel, base_kernel
from .radial import QuadEstimate, RadialProfile, radial_convolve, radial_integral, tabulate
from .spec import Family, KernelSpec

logger = logging.getLogger(__name__)

RadialFn = Callable[[float], float]


@dataclass(frozen=True)
class CosineTerm:
    amplitude: float
    frequency: float

    @property
    def is_constant(self) -> bool:
        return self.frequency == 0.0


class Correlation(ABC):
    """Radial-plus-atomic correlation measure on R^d."""

    d: int
    delta_weight: float = 0.0
    cosines: Tuple[CosineTerm, ...] = ()
    #: density ~ r^-density_small_exponent near 0
    density_small_exponent: float = 0.0
    #: density ~ r^-density_tail_exponent at infinity; None for faster decay
    density_tail_exponent: Optional[float] = None
    #: spectral density ~ rho^-spectral_small_exponent near 0
    spectral_small_exponent: float = 0.0
    spectral_tail_exponent: Optional[float] = None
    breakpoints: Tuple[float, ...] = (1.0,)
    compact_at: Optional[float] = None
    nonnegative: bool = True
    exact_atom_structure: bool = True

    @property
    def has_density(self) -> bool:
        return False

    def density(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))

    @property
    def has_spectral_density(self) -> bool:
        return False

    def spectral_density(self, rho):
        """Continuous part of f_hat at frequency modulus rho."""
        return None

    # =========================================================================
    # Atoms
    # =========================================================================

    @property
    def atom_at_zero(self) -> float:
        """Spectral atom at the origin (averaging normalization)."""
        return sum(c.amplitude for c in self.cosines if c.is_constant)

    def value_at(self, x) -> float:
        """Pointwise f(x) off the origin, ignoring the delta part."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        r = float(np.linalg.norm(x))
        total = float(self.density(r)) if self.has_density else 0.0
        for c in self.cosines:
            total += c.amplitude * math.cos(c.frequency * x[0])
        return total

    # =========================================================================
    # Integrals
    # =========================================================================

    def density_convolve(self, g: RadialFn, r: float, scales: Tuple[float, ...] = ()) -> QuadEstimate:
        if not self.has_density:
            return QuadEstimate(0.0)
        breaks = tuple(sorted({*self.breakpoints, *scales}))
        return radial_convolve(g, lambda s: float(self.density(s)), r, self.d, breaks)

    def convolve_at(self, g: RadialFn, g_hat: RadialFn, x, scales: Tuple[float, ...] = ()) -> QuadEstimate:
        """(g * f)(x) for a radial g with radial transform g_hat.

        ``scales`` adds quadrature breakpoints at the length scales of g.
        """
        x = np.atleast_1d(np.asarray(x, dtype=float))
        r = float(np.linalg.norm(x))
        total = QuadEstimate(self.delta_weight * float(g(r)) if self.delta_weight else 0.0)
        total = total + self.density_convolve(g, r, scales)
        for c in self.cosines:
            total = total + QuadEstimate(c.amplitude * float(g_hat(c.frequency)) * math.cos(c.frequency * x[0]))
        return total

    def integrate_against(self, g: RadialFn, g_hat: RadialFn, scales: Tuple[float, ...] = ()) -> QuadEstimate:
        """int g(x) f(dx) for a radial g."""
        return self.convolve_at(g, g_hat, np.zeros(self.d), scales)

    def spectral_integral(self, weight: RadialFn) -> QuadEstimate:
        """int weight(|z|) f_hat(dz) in the transform convention of kernels.analytic."""
        total = QuadEstimate(0.0)
        if self.has_spectral_density:
            breaks = tuple(sorted({1.0, *[1.0 / b for b in self.breakpoints if b > 0]}))
            total = radial_integral(lambda rho: float(self.spectral_density(rho)) * weight(rho), self.d, breaks)
        mass = (2 * math.pi) ** self.d
        for c in self.cosines:
            total = total + QuadEstimate(mass * c.amplitude * float(weight(c.frequency)))
        return total

    def box_mass(self, half_width: float) -> QuadEstimate:
        """f([-a, a]^d)."""
        a, d = half_width, self.d
        total = QuadEstimate(self.delta_weight)
        for c in self.cosines:
            # int over the box of cos(w x_1) = (2 a)^{d-1} * 2 sin(w a) / w
            along = 2 * a if c.is_constant else 2 * math.sin(c.frequency * a) / c.frequency
            total = total + QuadEstimate(c.amplitude * along * (2 * a) ** (d - 1))
        if self.has_density:
            total = total + _box_density_integral(self, a)
        return total

    def ball_mass(self, radius: float) -> QuadEstimate:
        """f(B_r)."""
        d = self.d
        total = QuadEstimate(self.delta_weight)
        for c in self.cosines:
            if c.is_constant:
                total = total + QuadEstimate(c.amplitude * ball_volume(d, radius))
            else:
                w = c.frequency
                ft = (2 * math.pi * radius / w) ** (d / 2) * special.jv(d / 2, radius * w)
                total = total + QuadEstimate(c.amplitude * float(ft))
        if self.has_density:
            total = total + radial_integral(lambda s: float(self.density(s)), d, self.breakpoints, upper=radius)
        return total


def _box_density_integral(corr: Correlation, a: float) -> QuadEstimate:
    d = corr.d
    dens = corr.density
    if d == 1:
        return radial_integral(lambda s: float(dens(s)), 1, corr.breakpoints, upper=a)
    # integrate over the positive orthant and multiply by 2^d
    if d == 2:
        value, error = integrate.dblquad(
            lambda y, x: float(dens(math.hypot(x, y))), 0.0, a, 0.0, a, epsrel=1e-6
        )
    else:
        value, error = integrate.tplquad(
            lambda z, y, x: float(dens(math.sqrt(x * x + y * y + z * z))),
            0.0, a, 0.0, a, 0.0, a, epsrel=1e-5,
        )
    return QuadEstimate(2 ** d * value, 2 ** d * error)


# =============================================================================
# Families
# =============================================================================

class WhiteNoiseCorrelation(Correlation):
    def __init__(self, d: int):
        self.d = d
        self.delta_weight = 1.0

    @property
    def has_spectral_density(self) -> bool:
        return True

    def spectral_density(self, rho):
        return np.ones_like(np.asarray(rho, dtype=float))


class AtomicCorrelation(Correlation):
    """Finite sum of cosine terms (Constant and CosineF)."""

    def __init__(self, cosines, d: int):
        self.d = d
        self.cosines = tuple(c for c in cosines if c.amplitude != 0.0)
        self.nonnegative = all(c.is_constant for c in self.cosines)


class DensityCorrelation(Correlation):
    """Radial density given by closed-form callables."""

    def __init__(self, d: int, density: Callable, spectral: Optional[Callable] = None,
                 small: float = 0.0, tail: Optional[float] = None,
                 spectral_small: float = 0.0, spectral_tail: Optional[float] = None,
                 breakpoints: Tuple[float, ...] = (1.0,), compact_at: Optional[float] = None):
        self.d = d
        self._density = density
        self._spectral = spectral
        self.density_small_exponent = small
        self.density_tail_exponent = tail
        self.spectral_small_exponent = spectral_small
        self.spectral_tail_exponent = spectral_tail
        self.breakpoints = breakpoints
        self.compact_at = compact_at

    @property
    def has_density(self) -> bool:
        return True

    def density(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self._density(r)
        return out if np.ndim(out) else float(out)

    @property
    def has_spectral_density(self) -> bool:
        return self._spectral is not None

    def spectral_density(self, rho):
        if self._spectral is None:
            return None
        with np.errstate(divide="ignore", invalid="ignore"):
            return self._spectral(np.asarray(rho, dtype=float))


class ProfileCorrelation(Correlation):
    """Density known only through a lazily tabulated radial profile."""

    def __init__(self, d: int, build: Callable[[], RadialProfile], small: float,
                 tail: Optional[float], breakpoints: Tuple[float, ...], compact_at: Optional[float] = None,
                 nonnegative: bool = True):
        self.d = d
        self._build = build
        self._profile: Optional[RadialProfile] = None
        self._lock = threading.Lock()
        self.density_small_exponent = small
        self.density_tail_exponent = tail
        self.breakpoints = breakpoints
        self.compact_at = compact_at
        self.nonnegative = nonnegative

    @property
    def profile(self) -> RadialProfile:
        if self._profile is None:
            with self._lock:
                if self._profile is None:
                    self._profile = self._build()
        return self._profile

    @property
    def has_density(self) -> bool:
        return True

    def density(self, r):
        return self.profile(r)


def riesz_constant(gamma: float, d: int) -> float:
    """C with f_hat(z) = C |z|^{gamma-d} for f(x) = |x|^{-gamma}."""
    return math.pi ** (d / 2) * 2 ** (d - gamma) * math.gamma((d - gamma) / 2) / math.gamma(gamma / 2)


def exp_decay_constant(d: int) -> float:
    return 2 ** d * math.pi ** ((d - 1) / 2) * math.gamma((d + 1) / 2)


def ball_overlap(r, radius: float, d: int):
    """Volume of the intersection of two balls of the given radius at distance r."""
    r = np.asarray(r, dtype=float)
    R = radius
    inside = r < 2 * R
    rc = np.clip(r, 0.0, 2 * R)
    if d == 1:
        out = 2 * R - rc
    elif d == 2:
        out = 2 * R ** 2 * np.arccos(rc / (2 * R)) - 0.5 * rc * np.sqrt(np.maximum(4 * R ** 2 - rc ** 2, 0.0))
    else:
        out = math.pi * (4 * R + rc) * (2 * R - rc) ** 2 / 12
    out = np.where(inside, out, 0.0)
    return out if out.ndim else float(out)


def self_convolution_profile(kernel: BaseKernel, small: float, r_max: float, compact: bool,
                             n: int = 48) -> RadialProfile:
    """Tabulate f_bar = |h| * |h~| for a radial base kernel."""
    d = kernel.d
    shell = kernel.shell_moment if isinstance(kernel, PowerKernel) else None
    r_min = 1e-3 if not isinstance(kernel, TableKernel) else kernel.dx / 4

    def at(r: float) -> QuadEstimate:
        return radial_convolve(
            lambda s: float(kernel.abs_value(s)),
            lambda s: float(kernel.abs_value(s)),
            r, d, kernel.breakpoints, shell_integral=shell,
        )

    return tabulate(at, r_min, r_max, n=n, small_exponent=small, compact=compact)


CACHE_SIZE = 64


@functools.lru_cache(maxsize=CACHE_SIZE)
def correlation_of(spec: KernelSpec) -> Correlation:
    """The correlation f of an f-spec, or f_bar = |h| * |h~| of an h-spec."""
    return _build_correlation(spec)


def _build_correlation(spec: KernelSpec) -> Correlation:
    p, d, fam = spec.params, spec.d, spec.family
    if fam == Family.WHITE_NOISE:
        return WhiteNoiseCorrelation(d)
    if fam == Family.CONSTANT:
        return AtomicCorrelation([CosineTerm(p["level"], 0.0)], d)
    if fam == Family.COSINE_F:
        return AtomicCorrelation([CosineTerm(p["offset"], 0.0), CosineTerm(1.0, p["frequency"])], d)
    if fam == Family.RIESZ_F:
        g = p["gamma"]
        const = riesz_constant(g, d)
        return DensityCorrelation(
            d, lambda r: r ** (-g), lambda rho: const * rho ** (g - d),
            small=g, tail=g, spectral_small=d - g, spectral_tail=d - g,
        )
    if fam == Family.EXP_DECAY_F:
        a = p["rate"]
        const = exp_decay_constant(d)
        return DensityCorrelation(
            d, lambda r: np.exp(-a * r), lambda rho: const * a / (a ** 2 + rho ** 2) ** ((d + 1) / 2),
            spectral_tail=d + 1.0, breakpoints=(1.0 / a, 10.0 / a),
        )
    if fam == Family.CAUCHY_F:
        c = p["scale"]
        const = c ** d * math.pi ** ((d + 1) / 2) / math.gamma((d + 1) / 2)
        return DensityCorrelation(
            d, lambda r: (1 + r ** 2 / c ** 2) ** (-(d + 1) / 2), lambda rho: const * np.exp(-c * rho),
            tail=d + 1.0, breakpoints=(c, 10 * c),
        )
    if fam == Family.GAUSSIAN_H:
        s2 = 2 * p["scale"] ** 2
        return DensityCorrelation(
            d, lambda r: (2 * math.pi * s2) ** (-d / 2) * np.exp(-(r ** 2) / (2 * s2)),
            lambda rho: np.exp(-p["scale"] ** 2 * rho ** 2),
            breakpoints=(p["scale"], 6 * p["scale"]),
        )
    if fam == Family.INDICATOR_H:
        kernel = base_kernel(spec)
        R = p["width"] / 2
        return DensityCorrelation(
            d, lambda r: ball_overlap(r, R, d), lambda rho: kernel.fourier(rho) ** 2,
            spectral_tail=d + 1.0, breakpoints=(R, 2 * R), compact_at=2 * R,
        )
    if fam == Family.POWER_H:
        kernel = base_kernel(spec)
        small = kernel.correlation_small_exponent
        tail = kernel.correlation_tail_exponent
        return ProfileCorrelation(
            d, lambda: self_convolution_profile(kernel, small, 1e3, compact=False),
            small=small, tail=tail, breakpoints=(1.0, 2.0),
        )
    if fam == Family.TABLE_H:
        kernel = base_kernel(spec)
        support = 2 * kernel.support
        return ProfileCorrelation(
            d, lambda: self_convolution_profile(kernel, 0.0, support, compact=True),
            small=0.0, tail=None, breakpoints=(support / 2, support), compact_at=support,
        )
    if fam == Family.TABLE_F:
        table = TableKernel(spec.samples, p["dx"], d)
        corr = DensityCorrelation(
            d, table.value, small=0.0, tail=None,
            breakpoints=table.breakpoints or (table.support,), compact_at=table.support,
        )
        corr.nonnegative = bool(np.all(table.samples >= 0))
        corr.exact_atom_structure = False
        return corr
    raise ValueError(f"Unhandled family {fam}")


def clear_cache() -> None:
    correlation_of.cache_clear()
