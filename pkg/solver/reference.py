"""The one-dimensional SDE dX = lambda sigma(X) dW, X_0 = 1.

With f identically lambda^2 the noise is spatially constant and the
solution of the heat equation is this diffusion at every x.
"""

import math

import numpy as np

from common.errors import DomainError
from noise.rng import RandomStreams

from .sigma import SigmaFamily, SigmaSpec

DEFAULT_EM_STEPS = 1000


def nonergodic_reference(sigma: SigmaSpec, lam: float, t: float, replicas: int, seed: int = 0,
                         steps: int = DEFAULT_EM_STEPS, x0: float = 1.0) -> np.ndarray:
    """Samples of X_t.

    Linear sigma uses the exact log-normal law exp(lam W_t - lam^2 t / 2);
    every other sigma runs Euler-Maruyama with ``steps`` steps.
    """
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    if replicas < 1:
        raise DomainError(f"replicas must be positive, got {replicas}")
    rng = RandomStreams(seed).generator(0, 0)
    if sigma.family == SigmaFamily.LINEAR:
        w = math.sqrt(t) * rng.standard_normal(replicas)
        return x0 * np.exp(lam * w - 0.5 * lam ** 2 * t)
    dt = t / steps
    x = np.full(replicas, x0, dtype=float)
    for _ in range(steps):
        x = x + lam * sigma(x) * math.sqrt(dt) * rng.standard_normal(replicas)
    return x


def lognormal_variance(lam: float, t: float) -> float:
    """Var(X_t) = exp(lam^2 t) - 1 for linear sigma."""
    return math.expm1(lam ** 2 * t)
