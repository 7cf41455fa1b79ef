"""Exact covariance of the additive-noise solution."""

import math

import numpy as np

from common.errors import DomainError, UnsupportedSpecError
from kernels.analytic import time_integrated_heat, time_integrated_heat_fourier
from kernels.correlation import correlation_of
from kernels.radial import piecewise_quad
from kernels.spec import Family, KernelSpec


def gaussian_covariance(spec: KernelSpec, c0: float, t: float, x) -> float:
    """Cov[u(t,x), u(t,0)] = c0^2 int_0^t (p_{2s} * f)(x) ds for sigma = c0."""
    if t < 0:
        raise DomainError(f"t must be nonnegative, got {t}")
    if t == 0:
        return 0.0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    corr = correlation_of(spec)
    d = corr.d
    if x.size != d:
        raise DomainError(f"Point {x.tolist()} does not match dimension {d}")
    if spec.family == Family.GAUSSIAN_H:
        # f = p_{2 s^2}, so the time integral telescopes
        s2 = spec.params["scale"] ** 2
        r = float(np.linalg.norm(x))
        return c0 ** 2 * float(time_integrated_heat(s2 + t, r, d) - time_integrated_heat(s2, r, d))
    scale = math.sqrt(4 * t)
    est = corr.convolve_at(
        lambda r: float(time_integrated_heat(t, r, d)),
        lambda z: float(time_integrated_heat_fourier(t, z)),
        x, (scale, 6 * scale),
    )
    return c0 ** 2 * est.value


def averaged_covariance(spec: KernelSpec, c0: float, t: float, N: float) -> float:
    """N^{-2} int_0^N int_0^N Cov[u(t,x), u(t,y)] dx dy in d = 1.

    Tends to c0^2 t times the spectral atom at 0.
    """
    if spec.d != 1:
        raise UnsupportedSpecError("averaged_covariance is implemented for d = 1")
    est = piecewise_quad(
        lambda r: gaussian_covariance(spec, c0, t, [r]) * (1 - r / N),
        [b for b in (math.sqrt(t), 10 * math.sqrt(t)) if b < N], upper=N,
    )
    return 2.0 * est.value / N
