"""Solution fields and ensemble runs."""

import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from common.aggregate import RunningMoments
from common.errors import DomainError
from noise.grid import Grid


@dataclass
class SolutionField:
    """u(t, .) for a batch of replicas, shape (replicas, *grid.shape)."""

    grid: Grid
    t: float
    values: np.ndarray
    step_index: int = 0
    provenance: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def initial(cls, grid: Grid, replicas: int = 1, u0=1.0, provenance: Optional[Dict[str, Any]] = None) -> "SolutionField":
        """u(0) = u0 broadcast over replicas; u0 is a scalar or an array of grid shape."""
        u0 = np.asarray(u0, dtype=float)
        if u0.ndim and u0.shape != grid.shape:
            raise DomainError(f"Initial data of shape {u0.shape} does not match grid shape {grid.shape}")
        if not np.all(np.isfinite(u0)):
            raise DomainError("Initial data must be finite")
        values = np.broadcast_to(u0, (replicas, *grid.shape)).astype(float)
        return cls(grid, 0.0, values, 0, dict(provenance or {}))

    @property
    def replicas(self) -> int:
        return int(self.values.shape[0])

    def replica(self, i: int) -> np.ndarray:
        return self.values[i]

    def at_cell(self, index) -> np.ndarray:
        """Values at one cell across replicas."""
        index = (index,) * self.grid.d if np.ndim(index) == 0 else tuple(index)
        return self.values[(slice(None), *index)]


@dataclass
class Snapshot:
    """Replica fields (or their per-block reductions) at one requested time."""

    t: float
    step_index: int
    field: Optional[SolutionField]
    moments: RunningMoments
    reduced: List[Any] = field(default_factory=list)


@dataclass
class EnsembleRun:
    grid: Grid
    replicas: int
    seed: int
    scheme: str
    snapshots: List[Snapshot]
    provenance: Dict[str, Any] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    @property
    def times(self) -> List[float]:
        return [s.t for s in self.snapshots]

    def snapshot_at(self, t: float) -> Snapshot:
        """The snapshot closest to t."""
        if not self.snapshots:
            raise DomainError("Run has no snapshots")
        return min(self.snapshots, key=lambda s: abs(s.t - t))

    def field_at(self, t: float) -> SolutionField:
        snap = self.snapshot_at(t)
        if snap.field is None:
            raise DomainError(f"Fields at t={snap.t:g} were reduced per block and not kept")
        return snap.field

    def summary(self) -> Dict[str, Any]:
        """Ensemble moments averaged over cells, per snapshot."""
        rows = []
        for snap in self.snapshots:
            m = snap.moments
            rows.append({
                "t": snap.t,
                "step": snap.step_index,
                "mean": float(np.mean(m.mean)),
                "variance": float(np.mean(m.variance)),
                "max_mean_deviation_stderr": float(np.max(np.abs(m.mean - 1.0) / np.maximum(m.stderr, 1e-300))),
            })
        return {
            "replicas": self.replicas,
            "seed": self.seed,
            "scheme": self.scheme,
            "grid": self.grid.to_dict(),
            "snapshots": rows,
            "provenance": self.provenance,
            "warnings": self.warnings,
        }

    def __str__(self) -> str:
        return json.dumps(self.summary(), indent=2, default=str)


def resolve_field(run, t: Optional[float] = None) -> SolutionField:
    """The field of an EnsembleRun at t (default the last snapshot), or a field as is."""
    if isinstance(run, SolutionField):
        return run
    return run.field_at(run.times[-1] if t is None else t)
