"""Periodic lattice on which noise and solutions live."""

import math
from dataclasses import asdict, dataclass
from typing import Optional, Tuple

import numpy as np

from common.errors import DomainError

MIN_CELLS = 8


@dataclass(frozen=True)
class Grid:
    """Torus [0, n_cells * dx)^d with n_cells cells per axis.

    ``dt`` defaults to dx^2 / 4.
    """

    d: int
    n_cells: int
    dx: float
    dt: Optional[float] = None

    def __post_init__(self) -> None:
        if self.d not in (1, 2, 3):
            raise DomainError(f"Grid dimension must be 1, 2 or 3, got {self.d}")
        n = self.n_cells
        if n < MIN_CELLS or n & (n - 1):
            raise DomainError(f"n_cells must be a power of two >= {MIN_CELLS}, got {n}")
        if not self.dx > 0:
            raise DomainError(f"dx must be positive, got {self.dx}")
        if self.dt is None:
            object.__setattr__(self, "dt", self.dx ** 2 / 4)
        elif not self.dt > 0:
            raise DomainError(f"dt must be positive, got {self.dt}")

    @property
    def length(self) -> float:
        return self.n_cells * self.dx

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.n_cells,) * self.d

    @property
    def size(self) -> int:
        return self.n_cells ** self.d

    @property
    def cell_volume(self) -> float:
        return self.dx ** self.d

    @property
    def spatial_axes(self) -> Tuple[int, ...]:
        """Axes of a batch-first array (replicas, *shape) that are spatial."""
        return tuple(range(1, self.d + 1))

    def with_dt(self, dt: float) -> "Grid":
        return Grid(self.d, self.n_cells, self.dx, dt)

    # =========================================================================
    # Lattice geometry
    # =========================================================================

    def coordinates(self) -> np.ndarray:
        """Cell positions k * dx along one axis."""
        return self.dx * np.arange(self.n_cells)

    def torus_distance(self) -> np.ndarray:
        """|x| on the torus for every cell, shape ``self.shape``."""
        axis = self.dx * np.minimum(np.arange(self.n_cells), self.n_cells - np.arange(self.n_cells))
        mesh = np.meshgrid(*([axis] * self.d), indexing="ij")
        return np.sqrt(sum(m ** 2 for m in mesh))

    def wavenumbers(self, real: bool = True) -> Tuple[np.ndarray, ...]:
        """Angular frequencies 2 pi m / L per axis, broadcastable to the (r)fft layout."""
        full = 2 * math.pi * np.fft.fftfreq(self.n_cells, d=self.dx)
        half = 2 * math.pi * np.fft.rfftfreq(self.n_cells, d=self.dx)
        axes = [full] * (self.d - 1) + [half if real else full]
        return tuple(np.meshgrid(*axes, indexing="ij"))

    def k_squared(self) -> np.ndarray:
        """|k|^2 on the rfft layout."""
        return sum(k ** 2 for k in self.wavenumbers())

    def lattice_symbol(self) -> np.ndarray:
        """Finite-difference Laplacian symbol sum_j (2 - 2 cos(k_j dx)) / dx^2."""
        return sum((2 - 2 * np.cos(k * self.dx)) / self.dx ** 2 for k in self.wavenumbers())

    def cells_for(self, length: float) -> int:
        """Number of cells covering a length, at least one."""
        return max(1, int(round(length / self.dx)))

    def to_dict(self) -> dict:
        data = asdict(self)
        data["length"] = self.length
        return data
