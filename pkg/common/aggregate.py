"""Mergeable aggregators for replica statistics."""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np


@dataclass
class RunningMoments:
    """Streaming mean and variance with an associative merge.

    Works elementwise on arrays, so one aggregator can hold per-cell
    moments for a whole field. Merging uses the pairwise update of
    Chan et al., which makes the result independent of merge order up to
    floating point; callers merge in block order to get identical bits.
    """

    count: int = 0
    mean: Optional[np.ndarray] = None
    m2: Optional[np.ndarray] = None

    def update_batch(self, values: np.ndarray) -> "RunningMoments":
        """Fold a batch (replicas along axis 0) into the aggregate."""
        values = np.asarray(values, dtype=float)
        other = RunningMoments(
            count=values.shape[0],
            mean=values.mean(axis=0),
            m2=((values - values.mean(axis=0)) ** 2).sum(axis=0),
        )
        merged = self.merge(other)
        self.count, self.mean, self.m2 = merged.count, merged.mean, merged.m2
        return self

    def merge(self, other: "RunningMoments") -> "RunningMoments":
        if self.count == 0:
            return RunningMoments(other.count, other.mean, other.m2)
        if other.count == 0:
            return RunningMoments(self.count, self.mean, self.m2)
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.count / n)
        m2 = self.m2 + other.m2 + delta ** 2 * (self.count * other.count / n)
        return RunningMoments(n, mean, m2)

    @property
    def variance(self) -> np.ndarray:
        return self.m2 / max(self.count - 1, 1)

    @property
    def stderr(self) -> np.ndarray:
        return np.sqrt(self.variance / max(self.count, 1))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "count": self.count,
            "mean": np.asarray(self.mean).tolist() if self.mean is not None else None,
            "variance": np.asarray(self.variance).tolist() if self.mean is not None else None,
        }


def jackknife_variance_stderr(samples: np.ndarray) -> float:
    """Standard error of the sample variance by leave-one-out jackknife.

    Uses the closed form for leave-one-out sums so the cost is linear in
    the number of replicas.
    """
    x = np.asarray(samples, dtype=float).ravel()
    n = x.size
    if n < 3:
        return float("nan")
    s1 = x.sum()
    s2 = (x ** 2).sum()
    loo_s1 = s1 - x
    loo_s2 = s2 - x ** 2
    m = n - 1
    loo_var = (loo_s2 - loo_s1 ** 2 / m) / (m - 1)
    mean_loo = loo_var.mean()
    return float(np.sqrt((n - 1) / n * ((loo_var - mean_loo) ** 2).sum()))


def batch_means_variance_stderr(samples: np.ndarray, n_batches: int = 20) -> float:
    """Standard error of the sample variance from independent batches."""
    x = np.asarray(samples, dtype=float).ravel()
    n_batches = min(n_batches, x.size // 2)
    if n_batches < 2:
        return float("nan")
    usable = (x.size // n_batches) * n_batches
    batches = x[:usable].reshape(n_batches, -1)
    batch_var = batches.var(axis=1, ddof=1)
    # each batch variance estimates the same quantity from 1/n_batches of the data
    return float(batch_var.std(ddof=1) / np.sqrt(n_batches))
