"""Quadrature helpers for radial functions on R^d, d <= 3."""

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy import integrate

from .analytic import sphere_area

logger = logging.getLogger(__name__)

RadialFn = Callable[[float], float]

REL_TOL = 1e-6
ABS_TOL = 1e-12
QUAD_LIMIT = 200


@dataclass
class QuadEstimate:
    """Quadrature value with its error estimate.

    ``flagged`` is set when quad reported an integration warning; the value
    is then an estimate whose accuracy is bounded only by ``error``.
    """

    value: float
    error: float = 0.0
    flagged: bool = False
    messages: List[str] = field(default_factory=list)

    def __float__(self) -> float:
        return self.value

    def __add__(self, other: "QuadEstimate") -> "QuadEstimate":
        return QuadEstimate(
            self.value + other.value,
            self.error + other.error,
            self.flagged or other.flagged,
            self.messages + other.messages,
        )

    def scaled(self, factor: float) -> "QuadEstimate":
        return QuadEstimate(self.value * factor, self.error * abs(factor), self.flagged, list(self.messages))

    def to_dict(self) -> dict:
        return {"value": self.value, "error": self.error, "flagged": self.flagged}


def quad(fn: RadialFn, a: float, b: float, points: Optional[Sequence[float]] = None,
         epsrel: float = REL_TOL, epsabs: float = ABS_TOL) -> QuadEstimate:
    """scipy.integrate.quad that records warnings instead of emitting them."""
    if b <= a:
        return QuadEstimate(0.0)
    kwargs = dict(limit=QUAD_LIMIT, epsrel=epsrel, epsabs=epsabs)
    if points is not None and math.isfinite(b):
        inner = sorted(p for p in points if a < p < b)
        if inner:
            kwargs["points"] = inner
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        value, error = integrate.quad(fn, a, b, **kwargs)
    messages = [str(w.message) for w in caught if issubclass(w.category, integrate.IntegrationWarning)]
    return QuadEstimate(float(value), float(error), bool(messages), messages)


def piecewise_quad(fn: RadialFn, breakpoints: Sequence[float], upper: float = math.inf,
                   epsrel: float = REL_TOL, lower: float = 0.0) -> QuadEstimate:
    """Integrate fn over [lower, upper] split at the given breakpoints."""
    edges = sorted({lower, *[b for b in breakpoints if lower < b < upper]})
    edges.append(upper)
    total = QuadEstimate(0.0)
    for a, b in zip(edges[:-1], edges[1:]):
        total = total + quad(fn, a, b, epsrel=epsrel)
    return total


def radial_integral(fn: RadialFn, d: int, breakpoints: Sequence[float] = (1.0,),
                    upper: float = math.inf) -> QuadEstimate:
    """int over R^d of a radial function: S_d int_0^upper r^{d-1} fn(r) dr."""
    return piecewise_quad(lambda r: r ** (d - 1) * fn(r), breakpoints, upper).scaled(sphere_area(d))


def radial_convolve(a: RadialFn, b: RadialFn, r: float, d: int,
                    breakpoints: Sequence[float] = (1.0,),
                    shell_integral: Optional[Callable[[float, float], float]] = None) -> QuadEstimate:
    """(a * b)(x) at |x| = r for radial a and b.

    d=1 integrates along the line with breaks at 0 and r; d=2 uses polar
    coordinates around the origin; d=3 integrates b over spherical shells,
    using ``shell_integral(lo, hi) = int_lo^hi s b(s) ds`` when supplied.
    """
    if r == 0:
        return radial_integral(lambda s: a(s) * b(s), d, breakpoints)
    if d == 1:
        cuts = sorted({*breakpoints, r, *[r + p for p in breakpoints]})
        left = piecewise_quad(lambda y: a(y) * b(y + r), breakpoints)
        right = piecewise_quad(lambda y: a(y) * b(abs(r - y)), cuts)
        return left + right
    if d == 2:
        def ring(rho: float) -> float:
            def around(theta: float) -> float:
                return b(math.sqrt(max(rho * rho + r * r - 2 * rho * r * math.cos(theta), 0.0)))
            inner, _ = integrate.quad(around, 0.0, math.pi, limit=QUAD_LIMIT, epsrel=REL_TOL)
            return 2.0 * rho * a(rho) * inner

        return piecewise_quad(ring, sorted({*breakpoints, r, 2 * r}))
    if d == 3:
        if shell_integral is None:
            def shell_integral(lo: float, hi: float) -> float:
                value, _ = integrate.quad(lambda s: s * b(s), lo, hi, limit=QUAD_LIMIT, epsrel=REL_TOL)
                return value

        def shell(rho: float) -> float:
            return rho * a(rho) * shell_integral(abs(rho - r), rho + r)

        return piecewise_quad(shell, sorted({*breakpoints, r, 2 * r})).scaled(2.0 * math.pi / r)
    raise ValueError(f"Unsupported dimension {d}")


# =============================================================================
# Tabulated radial profiles
# =============================================================================

@dataclass
class RadialProfile:
    """Positive radial function tabulated on a geometric grid.

    Log-log linear interpolation between nodes; below the first node the
    profile continues as ``r^-small_exponent`` and above the last node as
    ``r^-tail_exponent`` (or zero when ``compact`` is set).
    """

    radii: np.ndarray
    values: np.ndarray
    small_exponent: float = 0.0
    tail_exponent: Optional[float] = None
    compact: bool = False
    flagged: bool = False

    def __post_init__(self) -> None:
        self.radii = np.asarray(self.radii, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        positive = self.values > 0
        self._log_r = np.log(self.radii[positive])
        self._log_v = np.log(self.values[positive])
        if self.tail_exponent is None and not self.compact and positive.sum() >= 2:
            slope = (self._log_v[-1] - self._log_v[-2]) / (self._log_r[-1] - self._log_r[-2])
            self.tail_exponent = max(-slope, 0.0)

    @property
    def r_min(self) -> float:
        return float(self.radii[0])

    @property
    def r_max(self) -> float:
        return float(self.radii[-1])

    def __call__(self, r):
        scalar = np.ndim(r) == 0
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.zeros_like(r)
        if self._log_r.size:
            lo, hi = math.exp(self._log_r[0]), math.exp(self._log_r[-1])
            with np.errstate(divide="ignore"):
                log_r = np.log(r)
            inside = (r >= lo) & (r <= hi)
            out[inside] = np.exp(np.interp(log_r[inside], self._log_r, self._log_v))
            below = r < lo
            if self.small_exponent == 0:
                out[below] = math.exp(self._log_v[0])
            else:
                with np.errstate(over="ignore"):
                    out[below] = np.exp(self._log_v[0] - self.small_exponent * (log_r[below] - self._log_r[0]))
            above = r > hi
            if not self.compact:
                tail = self.tail_exponent or 0.0
                out[above] = np.exp(self._log_v[-1] - tail * (log_r[above] - self._log_r[-1]))
        return float(out[0]) if scalar else out


def tabulate(fn: Callable[[float], QuadEstimate], r_min: float, r_max: float, n: int = 48,
             small_exponent: float = 0.0, tail_exponent: Optional[float] = None,
             compact: bool = False) -> RadialProfile:
    """Evaluate fn on a geometric grid and wrap the result as a profile."""
    radii = np.geomspace(r_min, r_max, n)
    values = np.empty(n)
    flagged = False
    for i, r in enumerate(radii):
        est = fn(float(r))
        values[i] = est.value
        flagged = flagged or est.flagged
    if flagged:
        logger.warning("Quadrature flagged while tabulating radial profile on [%g, %g]", r_min, r_max)
    return RadialProfile(radii, values, small_exponent, tail_exponent, compact, flagged)
