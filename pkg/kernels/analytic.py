"""Closed-form kernels of the heat semigroup.

Fourier transforms follow the convention psi_hat(z) = int exp(i z.y) psi(y) dy,
so the heat kernel has transform exp(-t|z|^2/2) and the lambda-potential
density has transform 2 / (2 lambda + |z|^2).
"""

import math
from typing import Union

import numpy as np
from scipy import integrate, special

from common.errors import DomainError

ArrayLike = Union[float, np.ndarray]


def sphere_area(d: int) -> float:
    """Surface measure of the unit sphere in R^d (2 for d = 1)."""
    return 2.0 * math.pi ** (d / 2) / math.gamma(d / 2)


def ball_volume(d: int, r: float = 1.0) -> float:
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1) * r ** d


def _norm_and_dim(x) -> tuple:
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    return float(np.linalg.norm(arr)), arr.size


def omega_d(d: int, r: float) -> float:
    """Dimension weight: 1 in d=1, r log(max(1/r, e)) in d=2, r in d>=3."""
    if d < 1:
        raise DomainError(f"Dimension must be positive, got {d}")
    if not r > 0:
        raise DomainError(f"omega_d requires r > 0, got {r}")
    if d == 1:
        return 1.0
    if d == 2:
        return r * math.log(max(1.0 / r, math.e))
    return float(r)


def omega_d_array(d: int, r: np.ndarray) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if d == 1:
        return np.ones_like(r)
    if d == 2:
        return r * np.log(np.maximum(1.0 / r, math.e))
    return r


# =============================================================================
# Heat kernel
# =============================================================================

def heat_kernel_radial(t: float, r: ArrayLike, d: int) -> ArrayLike:
    """Gaussian heat kernel p_t at distance r from the origin."""
    if not t > 0:
        raise DomainError(f"heat_kernel requires t > 0, got {t}")
    r = np.asarray(r, dtype=float)
    return (2.0 * math.pi * t) ** (-d / 2) * np.exp(-(r ** 2) / (2.0 * t))


def heat_kernel(t: float, x) -> float:
    """p_t(x) for a point x; the dimension is the length of x."""
    norm, d = _norm_and_dim(x)
    return float(heat_kernel_radial(t, norm, d))


def time_integrated_heat(t: float, r: ArrayLike, d: int) -> ArrayLike:
    """int_0^t p_{2s}(r) ds in closed form.

    Infinite at r = 0 for d >= 2.
    """
    if t < 0:
        raise DomainError(f"time_integrated_heat requires t >= 0, got {t}")
    r = np.asarray(r, dtype=float)
    if t == 0:
        return np.zeros_like(r)
    with np.errstate(divide="ignore", invalid="ignore"):
        if d == 1:
            return math.sqrt(t / math.pi) * np.exp(-(r ** 2) / (4 * t)) - 0.5 * r * special.erfc(
                r / (2 * math.sqrt(t))
            )
        if d == 2:
            out = special.exp1(r ** 2 / (4 * t)) / (4 * math.pi)
            return np.where(r == 0, np.inf, out)
        if d == 3:
            out = special.erfc(r / (2 * math.sqrt(t))) / (4 * math.pi * r)
            return np.where(r == 0, np.inf, out)
    raise DomainError(f"Unsupported dimension {d}")


def time_integrated_heat_fourier(t: float, z: ArrayLike) -> ArrayLike:
    """Fourier transform of the time-integrated heat kernel: (1 - e^{-t|z|^2}) / |z|^2."""
    z2 = np.asarray(z, dtype=float) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -np.expm1(-t * z2) / z2
    return np.where(z2 == 0, t, out)


# =============================================================================
# lambda-potential density
# =============================================================================

def potential_kernel_radial(lam: float, r: ArrayLike, d: int) -> ArrayLike:
    """v_lambda(r) = int_0^inf exp(-lambda t) p_t(r) dt via modified Bessel K.

    Returns +inf at r = 0 when d >= 2.
    """
    if not lam > 0:
        raise DomainError(f"potential_kernel requires lambda > 0, got {lam}")
    r = np.asarray(r, dtype=float)
    k = math.sqrt(2.0 * lam)
    if d == 1:
        return np.exp(-k * r) / k
    if d == 3:
        with np.errstate(divide="ignore"):
            return np.where(r == 0, np.inf, np.exp(-k * r) / (2 * math.pi * r))
    nu = d / 2 - 1
    with np.errstate(divide="ignore", invalid="ignore"):
        out = 2.0 * (2 * math.pi) ** (-d / 2) * (k / r) ** nu * special.kv(nu, k * r)
    return np.where(r == 0, np.inf, out)


def potential_kernel(lam: float, x) -> float:
    """v_lambda(x) for a point x (closed form)."""
    norm, d = _norm_and_dim(x)
    return float(potential_kernel_radial(lam, norm, d))


def potential_kernel_quad(lam: float, x) -> float:
    """v_lambda(x) by quadrature of the Laplace transform of the heat kernel."""
    norm, d = _norm_and_dim(x)
    if not lam > 0:
        raise DomainError(f"potential_kernel requires lambda > 0, got {lam}")
    if norm == 0 and d >= 2:
        return math.inf

    def integrand(t: float) -> float:
        return math.exp(-lam * t) * float(heat_kernel_radial(t, norm, d))

    # the integrand peaks near t ~ r^2 / d; split there
    peak = max(norm ** 2 / d, 1e-12)
    points = sorted({peak, 1.0 / lam})
    total = 0.0
    edges = [0.0, *points, math.inf]
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        value, _ = integrate.quad(integrand, a, b, limit=200, epsrel=1e-10, epsabs=0.0)
        total += value
    return total


def potential_kernel_fourier(lam: float, z: ArrayLike) -> ArrayLike:
    return 2.0 / (2.0 * lam + np.asarray(z, dtype=float) ** 2)


def heat_kernel_fourier(t: float, z: ArrayLike) -> ArrayLike:
    return np.exp(-t * np.asarray(z, dtype=float) ** 2 / 2.0)
