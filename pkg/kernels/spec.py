"""Symbolic kernel descriptions.

A ``KernelSpec`` names a base kernel ``h`` or a correlation ``f`` by family
and parameters. Every analytic evaluation in the package starts from one.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

from common.errors import DomainError

MAX_DIMENSION = 3


class Family(str, Enum):
    WHITE_NOISE = "white_noise"
    CONSTANT = "constant"
    RIESZ_F = "riesz_f"
    EXP_DECAY_F = "exp_decay_f"
    CAUCHY_F = "cauchy_f"
    COSINE_F = "cosine_f"
    POWER_H = "power_h"
    INDICATOR_H = "indicator_h"
    GAUSSIAN_H = "gaussian_h"
    TABLE_H = "table_h"
    TABLE_F = "table_f"


class KernelKind(str, Enum):
    """Whether a spec describes a base kernel h or a correlation f."""

    H = "h"
    F = "f"


H_FAMILIES = frozenset({Family.POWER_H, Family.INDICATOR_H, Family.GAUSSIAN_H, Family.TABLE_H})

# Families whose spectral density (continuous part) is known in closed form.
SPECTRAL_FAMILIES = frozenset({
    Family.WHITE_NOISE,
    Family.RIESZ_F,
    Family.EXP_DECAY_F,
    Family.CAUCHY_F,
    Family.GAUSSIAN_H,
    Family.INDICATOR_H,
})

_REQUIRED_PARAMS: Dict[Family, Tuple[str, ...]] = {
    Family.WHITE_NOISE: (),
    Family.CONSTANT: ("level",),
    Family.RIESZ_F: ("gamma",),
    Family.EXP_DECAY_F: ("rate",),
    Family.CAUCHY_F: ("scale",),
    Family.COSINE_F: ("frequency", "offset"),
    Family.POWER_H: ("alpha", "beta", "c"),
    Family.INDICATOR_H: ("width",),
    Family.GAUSSIAN_H: ("scale",),
    Family.TABLE_H: ("dx",),
    Family.TABLE_F: ("dx",),
}


@dataclass(frozen=True)
class KernelSpec:
    """Family, dimension and parameters of a kernel.

    Table families carry ``samples``: a radial profile sampled at
    ``r = k * dx`` for k = 0, 1, ...; the profile is linearly interpolated
    and vanishes beyond the last sample.
    """

    family: Family
    d: int
    params: Dict[str, float] = field(default_factory=dict)
    samples: Optional[Tuple[float, ...]] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", Family(self.family))
        if not isinstance(self.d, int) or not 1 <= self.d <= MAX_DIMENSION:
            raise DomainError(f"Dimension must be 1, 2 or 3, got {self.d!r}")
        params = dict(self.params)
        if self.family == Family.POWER_H:
            params.setdefault("c", 1.0)
        if self.family == Family.COSINE_F:
            params.setdefault("offset", 0.0)
        missing = [k for k in _REQUIRED_PARAMS[self.family] if k not in params]
        if missing:
            raise DomainError(f"{self.family.value} requires parameters {missing}")
        unknown = set(params) - set(_REQUIRED_PARAMS[self.family])
        if unknown:
            raise DomainError(f"{self.family.value} does not take parameters {sorted(unknown)}")
        params = {k: float(v) for k, v in params.items()}
        object.__setattr__(self, "params", params)
        if self.samples is not None:
            object.__setattr__(self, "samples", tuple(float(s) for s in self.samples))
        self._validate()

    def _validate(self) -> None:
        p = self.params
        fam = self.family
        if fam == Family.CONSTANT and p["level"] < 0:
            raise DomainError("Constant requires level >= 0")
        if fam == Family.RIESZ_F and not 0 < p["gamma"] < self.d:
            raise DomainError(f"RieszF requires 0 < gamma < d, got gamma={p['gamma']}, d={self.d}")
        if fam == Family.EXP_DECAY_F and p["rate"] <= 0:
            raise DomainError("ExpDecayF requires rate > 0")
        if fam in (Family.CAUCHY_F, Family.GAUSSIAN_H) and p["scale"] <= 0:
            raise DomainError(f"{fam.value} requires scale > 0")
        if fam == Family.COSINE_F and p["offset"] < 0:
            raise DomainError("CosineF requires offset >= 0")
        if fam == Family.POWER_H:
            if p["alpha"] <= 0 or p["beta"] <= 0 or p["c"] <= 0:
                raise DomainError("PowerH requires alpha, beta, c > 0")
        if fam == Family.INDICATOR_H and p["width"] <= 0:
            raise DomainError("IndicatorH requires width > 0")
        if fam in (Family.TABLE_H, Family.TABLE_F):
            if p["dx"] <= 0:
                raise DomainError("Table kernels require dx > 0")
            if not self.samples or len(self.samples) < 2:
                raise DomainError("Table kernels require at least two samples")
            if not all(math.isfinite(s) for s in self.samples):
                raise DomainError("Table samples must be finite")
        elif self.samples is not None:
            raise DomainError(f"{fam.value} does not take samples")

    # =========================================================================
    # Constructors
    # =========================================================================

    @classmethod
    def white_noise(cls, d: int) -> "KernelSpec":
        return cls(Family.WHITE_NOISE, d)

    @classmethod
    def constant(cls, level: float, d: int) -> "KernelSpec":
        return cls(Family.CONSTANT, d, {"level": level})

    @classmethod
    def riesz(cls, gamma: float, d: int) -> "KernelSpec":
        return cls(Family.RIESZ_F, d, {"gamma": gamma})

    @classmethod
    def exp_decay(cls, rate: float, d: int) -> "KernelSpec":
        return cls(Family.EXP_DECAY_F, d, {"rate": rate})

    @classmethod
    def cauchy(cls, scale: float, d: int) -> "KernelSpec":
        return cls(Family.CAUCHY_F, d, {"scale": scale})

    @classmethod
    def cosine(cls, frequency: float, d: int, offset: float = 0.0) -> "KernelSpec":
        return cls(Family.COSINE_F, d, {"frequency": frequency, "offset": offset})

    @classmethod
    def power_h(cls, alpha: float, beta: float, d: int, c: float = 1.0) -> "KernelSpec":
        return cls(Family.POWER_H, d, {"alpha": alpha, "beta": beta, "c": c})

    @classmethod
    def indicator_h(cls, width: float, d: int) -> "KernelSpec":
        return cls(Family.INDICATOR_H, d, {"width": width})

    @classmethod
    def gaussian_h(cls, scale: float, d: int) -> "KernelSpec":
        return cls(Family.GAUSSIAN_H, d, {"scale": scale})

    @classmethod
    def table_h(cls, samples, dx: float, d: int) -> "KernelSpec":
        return cls(Family.TABLE_H, d, {"dx": dx}, tuple(samples))

    @classmethod
    def table_f(cls, samples, dx: float, d: int) -> "KernelSpec":
        return cls(Family.TABLE_F, d, {"dx": dx}, tuple(samples))

    # =========================================================================
    # Properties
    # =========================================================================

    @property
    def kind(self) -> KernelKind:
        return KernelKind.H if self.family in H_FAMILIES else KernelKind.F

    @property
    def is_h(self) -> bool:
        return self.kind == KernelKind.H

    @property
    def has_spectral_density(self) -> bool:
        return self.family in SPECTRAL_FAMILIES

    @property
    def in_power_range(self) -> bool:
        """PowerH parameters inside 0 < alpha < min(d, 2), beta > 0."""
        if self.family != Family.POWER_H:
            return False
        return 0 < self.params["alpha"] < min(self.d, 2)

    @property
    def key(self) -> Tuple[Any, ...]:
        """Hashable identity used for caching derived profiles."""
        return (self.family.value, self.d, tuple(sorted(self.params.items())), self.samples)

    def __hash__(self) -> int:
        return hash(self.key)

    def label(self) -> str:
        args = ", ".join(f"{k}={v:g}" for k, v in sorted(self.params.items()))
        return f"{self.family.value}({args}; d={self.d})"

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"family": self.family.value, "d": self.d, **self.params}
        if self.samples is not None:
            data["samples"] = list(self.samples)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "KernelSpec":
        data = dict(data)
        try:
            family = Family(data.pop("family"))
        except (KeyError, ValueError) as e:
            raise DomainError(f"Unknown or missing kernel family: {e}") from e
        d = data.pop("d", 1)
        samples = data.pop("samples", None)
        return cls(family, int(d), data, tuple(samples) if samples is not None else None)
