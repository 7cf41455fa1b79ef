"""Lipschitz factors and spatial averages of products of them."""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from common.errors import DomainError, PreconditionError
from solver.field import SolutionField

logger = logging.getLogger(__name__)


class GFamily(str, Enum):
    IDENTITY_MINUS_1 = "identity_minus_1"
    CLIP01 = "clip01"
    COSINE = "cosine"
    SINE = "sine"
    CUSTOM = "custom"


@dataclass(frozen=True)
class LipschitzFactor:
    """One factor g of a product functional.

    ``param`` is the level a of clip01 (g(w) = 1 ^ (w - a)_+) or the
    frequency z of cosine / sine (g(w) = cos(z w), sin(z w)). Custom factors
    interpolate (knots, values) and declare their Lipschitz constant.
    """

    family: GFamily
    param: float = 0.0
    knots: Optional[Tuple[float, ...]] = None
    values: Optional[Tuple[float, ...]] = None
    lip_declared: Optional[float] = None
    normalized: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", GFamily(self.family))
        if self.family in (GFamily.COSINE, GFamily.SINE) and self.param == 0:
            raise DomainError(f"{self.family.value} factor needs a nonzero frequency")
        if self.family == GFamily.CUSTOM:
            if self.knots is None or self.values is None or len(self.knots) != len(self.values) or len(self.knots) < 2:
                raise DomainError("custom factor needs matching knots and values")
            if self.lip_declared is None or not self.lip_declared > 0:
                raise DomainError("custom factor needs a positive declared Lipschitz constant")
            slopes = np.abs(np.diff(self.values) / np.diff(self.knots))
            if slopes.max() > self.lip_declared * (1 + 1e-9):
                raise DomainError(f"custom factor slope {slopes.max():g} exceeds declared lip {self.lip_declared:g}")

    def raw(self, w):
        w = np.asarray(w, dtype=float)
        fam = self.family
        if fam == GFamily.IDENTITY_MINUS_1:
            return w - 1.0
        if fam == GFamily.CLIP01:
            return np.minimum(1.0, np.maximum(w - self.param, 0.0))
        if fam == GFamily.COSINE:
            return np.cos(self.param * w)
        if fam == GFamily.SINE:
            return np.sin(self.param * w)
        return np.interp(w, self.knots, self.values)

    @property
    def lip(self) -> float:
        fam = self.family
        if fam in (GFamily.IDENTITY_MINUS_1, GFamily.CLIP01):
            return 1.0
        if fam in (GFamily.COSINE, GFamily.SINE):
            return abs(self.param)
        return float(self.lip_declared)

    def __call__(self, w):
        if not self.normalized:
            return self.raw(w)
        # g(0) = 0 and Lip(g) = 1
        return (self.raw(w) - float(self.raw(0.0))) / self.lip

    def with_normalization(self, normalized: bool = True) -> "LipschitzFactor":
        return LipschitzFactor(self.family, self.param, self.knots, self.values, self.lip_declared, normalized)

    def label(self) -> str:
        if self.family == GFamily.IDENTITY_MINUS_1:
            return self.family.value
        if self.family == GFamily.CUSTOM:
            return f"custom(lip={self.lip:g})"
        return f"{self.family.value}({self.param:g})"

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "LipschitzFactor":
        data = dict(data)
        family = GFamily(data.pop("family"))
        allowed = {"param", "knots", "values", "lip", "normalized"}
        unknown = set(data) - allowed
        if unknown:
            raise DomainError(f"Unknown factor keys: {sorted(unknown)}")
        knots = tuple(data["knots"]) if "knots" in data else None
        values = tuple(data["values"]) if "values" in data else None
        return cls(family, float(data.get("param", 0.0)), knots, values, data.get("lip"),
                   bool(data.get("normalized", False)))


@dataclass(frozen=True)
class AverageSpec:
    """Product functional prod_j g_j(u(t, x + shift_j))."""

    factors: Tuple[LipschitzFactor, ...]
    shifts: Tuple[Tuple[float, ...], ...]
    shift_id: str = "0"

    def __post_init__(self) -> None:
        if not self.factors:
            raise DomainError("AverageSpec needs at least one factor")
        if len(self.shifts) != len(self.factors):
            raise DomainError(f"{len(self.factors)} factors but {len(self.shifts)} shifts")
        dims = {len(s) for s in self.shifts}
        if len(dims) != 1:
            raise DomainError("All shifts must have the same dimension")

    @property
    def k(self) -> int:
        return len(self.factors)

    @property
    def d(self) -> int:
        return len(self.shifts[0])

    @property
    def g_family(self) -> str:
        return "*".join(f.label() for f in self.factors)

    def normalized(self) -> "AverageSpec":
        return AverageSpec(tuple(f.with_normalization() for f in self.factors), self.shifts, self.shift_id)

    @classmethod
    def single(cls, factor: LipschitzFactor, d: int = 1, shift_id: str = "0") -> "AverageSpec":
        return cls((factor,), ((0.0,) * d,), shift_id)

    def label(self) -> str:
        return f"k={self.k} {self.g_family} shift={self.shift_id}"


def snap_shift(field: SolutionField, shift: Sequence[float]) -> Tuple[int, ...]:
    """Shift in cells; off-grid shifts go to the nearest cell."""
    dx = field.grid.dx
    cells = tuple(int(round(s / dx)) for s in shift)
    if any(not math.isclose(c * dx, s, rel_tol=1e-9, abs_tol=1e-12) for c, s in zip(cells, shift)):
        logger.warning("Shift %s snapped to cell offsets %s", tuple(shift), cells)
    return cells


def product_field(field: SolutionField, avg: AverageSpec) -> np.ndarray:
    """G(x) = prod_j g_j(u(x + shift_j)) for every replica and cell."""
    if avg.d != field.grid.d:
        raise PreconditionError(f"Shifts of dimension {avg.d} on a grid of dimension {field.grid.d}")
    axes = field.grid.spatial_axes
    out = np.ones_like(field.values)
    for g, shift in zip(avg.factors, avg.shifts):
        cells = snap_shift(field, shift)
        shifted = np.roll(field.values, tuple(-c for c in cells), axis=axes) if any(cells) else field.values
        out = out * g(shifted)
    return out


def window_cells(field: SolutionField, N: float) -> int:
    n = field.grid.cells_for(N)
    if n > field.grid.n_cells // 2:
        raise PreconditionError(
            f"Window N={N:g} exceeds half the torus length {field.grid.length / 2:g}"
        )
    return n


def spatial_average(field: SolutionField, avg: AverageSpec, N: float) -> np.ndarray:
    """Average of G over the cells of [0, N]^d, one value per replica."""
    n = window_cells(field, N)
    window = (slice(None),) + (slice(0, n),) * field.grid.d
    return product_field(field, avg)[window].mean(axis=field.grid.spatial_axes)
