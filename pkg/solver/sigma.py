"""Lipschitz nonlinearities sigma(u)."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np

from common.errors import DomainError

DEFAULT_CAP = 10.0


class SigmaFamily(str, Enum):
    CONSTANT = "constant"
    LINEAR = "linear"
    AFFINE_CLIPPED = "affine_clipped"
    CUSTOM = "custom"


@dataclass(frozen=True)
class SigmaSpec:
    """sigma(u) by family.

    - constant: sigma(u) = c0
    - linear: sigma(u) = u
    - affine_clipped: sigma(u) = a + b * clip(u, -cap, cap)
    - custom: piecewise-linear through (knots, values), constant outside
    """

    family: SigmaFamily
    params: Dict[str, float] = field(default_factory=dict)
    knots: Optional[Tuple[float, ...]] = None
    values: Optional[Tuple[float, ...]] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", SigmaFamily(self.family))
        params = dict(self.params)
        fam = self.family
        if fam == SigmaFamily.CONSTANT:
            params.setdefault("c0", 1.0)
        elif fam == SigmaFamily.AFFINE_CLIPPED:
            if "a" not in params or "b" not in params:
                raise DomainError("affine_clipped sigma needs parameters a and b")
            params.setdefault("cap", DEFAULT_CAP)
            if not params["cap"] > 0:
                raise DomainError(f"cap must be positive, got {params['cap']}")
            if params["b"] == 0:
                raise DomainError("affine_clipped sigma needs b != 0; use constant instead")
        elif fam == SigmaFamily.CUSTOM:
            self._validate_table(params)
        object.__setattr__(self, "params", params)

    def _validate_table(self, params: Dict[str, float]) -> None:
        if self.knots is None or self.values is None or len(self.knots) != len(self.values) or len(self.knots) < 2:
            raise DomainError("custom sigma needs matching knots and values with at least two entries")
        knots = np.asarray(self.knots, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if np.any(np.diff(knots) <= 0):
            raise DomainError("custom sigma knots must be strictly increasing")
        if "lip" not in params:
            raise DomainError("custom sigma needs a declared Lipschitz constant lip")
        slopes = np.abs(np.diff(values) / np.diff(knots))
        if slopes.max() > params["lip"] * (1 + 1e-9):
            raise DomainError(
                f"custom sigma table has slope {slopes.max():g} above the declared lip {params['lip']:g}"
            )
        if not params["lip"] > 0:
            raise DomainError("custom sigma needs lip > 0")

    # =========================================================================
    # Constructors
    # =========================================================================

    @classmethod
    def constant(cls, c0: float = 1.0) -> "SigmaSpec":
        return cls(SigmaFamily.CONSTANT, {"c0": c0})

    @classmethod
    def linear(cls) -> "SigmaSpec":
        return cls(SigmaFamily.LINEAR)

    @classmethod
    def affine_clipped(cls, a: float, b: float, cap: float = DEFAULT_CAP) -> "SigmaSpec":
        return cls(SigmaFamily.AFFINE_CLIPPED, {"a": a, "b": b, "cap": cap})

    @classmethod
    def custom(cls, knots, values, lip: float) -> "SigmaSpec":
        return cls(SigmaFamily.CUSTOM, {"lip": lip}, tuple(map(float, knots)), tuple(map(float, values)))

    # =========================================================================
    # Evaluation
    # =========================================================================

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        fam, p = self.family, self.params
        if fam == SigmaFamily.CONSTANT:
            return np.full_like(u, p["c0"])
        if fam == SigmaFamily.LINEAR:
            return u.copy()
        if fam == SigmaFamily.AFFINE_CLIPPED:
            return p["a"] + p["b"] * np.clip(u, -p["cap"], p["cap"])
        return np.interp(u, self.knots, self.values)

    @property
    def lip(self) -> float:
        fam = self.family
        if fam == SigmaFamily.CONSTANT:
            return 0.0
        if fam == SigmaFamily.LINEAR:
            return 1.0
        if fam == SigmaFamily.AFFINE_CLIPPED:
            return abs(self.params["b"])
        return self.params["lip"]

    @property
    def sigma0(self) -> float:
        return float(self(0.0))

    @property
    def is_constant(self) -> bool:
        return self.family == SigmaFamily.CONSTANT

    @property
    def is_zero(self) -> bool:
        return self.is_constant and self.params["c0"] == 0.0

    def label(self) -> str:
        if self.family == SigmaFamily.CUSTOM:
            return f"custom(lip={self.lip:g})"
        args = ", ".join(f"{k}={v:g}" for k, v in sorted(self.params.items()))
        return f"{self.family.value}({args})"

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"family": self.family.value, **self.params}
        if self.knots is not None:
            data["knots"] = list(self.knots)
            data["values"] = list(self.values)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SigmaSpec":
        data = dict(data)
        if "family" not in data:
            raise DomainError("sigma section needs a family")
        family = SigmaFamily(data.pop("family"))
        knots = data.pop("knots", None)
        values = data.pop("values", None)
        allowed = {
            SigmaFamily.CONSTANT: {"c0"},
            SigmaFamily.LINEAR: set(),
            SigmaFamily.AFFINE_CLIPPED: {"a", "b", "cap"},
            SigmaFamily.CUSTOM: {"lip"},
        }[family]
        unknown = set(data) - allowed
        if unknown:
            raise DomainError(f"Unknown parameters for {family.value} sigma: {sorted(unknown)}")
        if family == SigmaFamily.CUSTOM:
            if knots is None or values is None or "lip" not in data:
                raise DomainError("custom sigma needs knots, values and lip")
            return cls.custom(knots, values, data["lip"])
        return cls(family, {k: float(v) for k, v in data.items()})
