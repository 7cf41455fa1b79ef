"""Moment and Malliavin-derivative bounds attached to a base kernel."""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from common.errors import DomainError, PreconditionError, VacuousBoundError

from .analytic import (
    heat_kernel,
    heat_kernel_radial,
    time_integrated_heat,
    time_integrated_heat_fourier,
)
from .correlation import correlation_of
from .potential import lambda_threshold, potential_integral
from .spec import KernelSpec

logger = logging.getLogger(__name__)

LAMBDA_CAP = 1e12


def z_k(k: float) -> float:
    """Burkholder-Davis-Gundy constant used by the moment bounds: 1 for k = 2, 2 sqrt(k) above."""
    if k < 2:
        raise DomainError(f"k must be at least 2, got {k}")
    return 1.0 if k == 2 else 2.0 * math.sqrt(k)


@dataclass
class MomentBound:
    beta: float
    z_k: float
    prefactor: float
    eps: float
    u0_sup: float

    def at_iteration(self, n: int) -> float:
        """Bound on N_{beta,k}(u_n)."""
        return self.prefactor * (1.0 / self.eps + (1 - self.eps) ** (n + 1) * self.u0_sup)

    @property
    def bound(self) -> float:
        """Supremum over n (attained at n = 0)."""
        return self.at_iteration(0)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["bound"] = self.bound
        return data


def moment_bound(spec: KernelSpec, sigma_lip: float, sigma0: float, u0_sup: float,
                 k: float = 2.0, eps: float = 0.5) -> MomentBound:
    """Uniform bound on the weighted moments of the Picard iterates."""
    if not sigma_lip > 0:
        raise DomainError("moment_bound requires Lip(sigma) > 0")
    if not 0 < eps < 1:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    zk = z_k(k)
    beta = lambda_threshold(spec, 2 * (1 - eps) ** 2 / (zk * sigma_lip) ** 2)
    return MomentBound(beta, zk, u0_sup + abs(sigma0) / sigma_lip, eps, u0_sup)


# =============================================================================
# Malliavin derivative bound
# =============================================================================

def kappa(spec: KernelSpec, t: float) -> float:
    """(p_{2t} * f_bar)(0)."""
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    corr = correlation_of(spec)
    d = corr.d
    scale = math.sqrt(2 * t)
    return corr.integrate_against(
        lambda r: float(heat_kernel_radial(2 * t, r, d)),
        lambda z: math.exp(-t * z * z),
        (scale, 6 * scale),
    ).value


def cumulative_kappa(spec: KernelSpec, t: float) -> float:
    """int_0^t kappa(s) ds = (K_t * f_bar)(0) with K_t the time-integrated heat kernel."""
    if t <= 0:
        return 0.0
    corr = correlation_of(spec)
    d = corr.d
    scale = math.sqrt(4 * t)
    return corr.integrate_against(
        lambda r: float(time_integrated_heat(t, r, d)),
        lambda z: float(time_integrated_heat_fourier(t, z)),
        (scale, 6 * scale),
    ).value


@dataclass
class HIterates:
    """h_n on a uniform time grid: h_0 = 1, h_n(t) = int_0^t h_{n-1}(s) kappa(t-s) ds."""

    times: np.ndarray
    values: np.ndarray  # shape (n_max + 1, len(times))

    def at(self, n: int, t: float) -> float:
        return float(np.interp(t, self.times, self.values[n]))

    def series(self, gamma: float, t: Optional[float] = None) -> np.ndarray:
        """Partial sums of H(t; gamma) = sum_n gamma^n h_n(t)."""
        powers = gamma ** np.arange(self.values.shape[0])
        col = self.values[:, -1] if t is None else np.array([self.at(n, t) for n in range(self.values.shape[0])])
        return np.cumsum(powers * col)


def h_iterates(spec: KernelSpec, t: float, n_max: int = 6, steps: int = 200) -> HIterates:
    """Product-integration of the h_n recursion.

    kappa is integrated exactly over each time cell (through cumulative_kappa),
    so singular kappa near 0 is handled; h_{n-1} is averaged over the cell.
    """
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    times = np.linspace(0.0, t, steps + 1)
    cum = np.array([cumulative_kappa(spec, s) for s in times])
    weights = np.diff(cum)  # weights[j] = int_{t_j}^{t_{j+1}} kappa
    values = np.zeros((n_max + 1, steps + 1))
    values[0] = 1.0
    for n in range(1, n_max + 1):
        prev = values[n - 1]
        cell = 0.5 * (prev[:-1] + prev[1:])
        for i in range(1, steps + 1):
            # s in cell m pairs with t_i - s in cell i - 1 - m
            values[n, i] = float(np.dot(cell[:i], weights[:i][::-1]))
    return HIterates(times, values)


def H_bound(spec: KernelSpec, t: float, gamma: float, lam: float) -> float:
    """e^{2 lambda t} / (1 - gamma (v_lambda * f_bar)(0) / 2), or inf when the denominator is not positive."""
    if gamma == 0:
        return math.exp(2 * lam * t)
    denom = 1.0 - gamma * potential_integral(spec, lam).value / 2
    return math.exp(2 * lam * t) / denom if denom > 0 else math.inf


@dataclass
class MalliavinBound:
    value: float
    lambda0: float
    kernel_integral: float
    z_k: float
    threshold: float
    kappa_at_t: Optional[float] = None
    gamma: Optional[float] = None
    h_at_t: List[float] = field(default_factory=list)
    H_series: List[float] = field(default_factory=list)
    H_geometric: Optional[float] = None
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def admissible_lambda(spec: KernelSpec, threshold: float, start: float = 2.0 ** -10,
                      cap: float = LAMBDA_CAP) -> float:
    """Smallest power-of-two lambda with (v_lambda * f_bar)(0) < threshold."""
    lam = start
    while lam <= cap:
        if potential_integral(spec, lam).value < threshold:
            return lam
        lam *= 2
    raise VacuousBoundError(f"No lambda up to {cap:g} gives (v_lambda * f_bar)(0) < {threshold:g}")


def malliavin_bound(spec: KernelSpec, t: float, s: float, x, y, k: float, T: float,
                    C_Tk: float, sigma_lip: float = 1.0, n_max: int = 4,
                    steps: int = 40) -> MalliavinBound:
    """Pointwise L^k bound on the Malliavin derivative D_{s,y} u(t, x).

    The result also carries h_n(t) for n <= n_max and the partial sums of
    H(t; gamma) with gamma = 2^{(d-2)/2} [z_k Lip(sigma)]^2, next to their
    geometric-series bound at lambda0.
    """
    if not 0 < s < t < T:
        raise DomainError(f"Need 0 < s < t < T, got s={s}, t={t}, T={T}")
    if not sigma_lip > 0:
        raise PreconditionError("malliavin_bound requires Lip(sigma) > 0")
    d = spec.d
    zk = z_k(k)
    factor = 2 ** ((d - 2) / 2) * (zk * sigma_lip) ** 2
    threshold = 1.0 / factor
    lam0 = admissible_lambda(spec, threshold)
    integral = potential_integral(spec, lam0).value
    diff = np.atleast_1d(np.asarray(x, dtype=float)) - np.atleast_1d(np.asarray(y, dtype=float))
    value = 2 * C_Tk * math.exp(lam0 * (t - s)) * heat_kernel(t - s, diff) / math.sqrt(1 - factor * integral)
    iterates = h_iterates(spec, t, n_max=n_max, steps=steps)
    return MalliavinBound(
        value, lam0, integral, zk, threshold, kappa(spec, t),
        gamma=factor,
        h_at_t=[float(h) for h in iterates.values[:, -1]],
        H_series=[float(h) for h in iterates.series(factor)],
        H_geometric=H_bound(spec, t, factor, lam0),
    )
