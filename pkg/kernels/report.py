"""Kernel analysis report."""

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from .spec import KernelSpec


class Classification(str, Enum):
    ERGODIC = "Ergodic"
    NON_ERGODIC = "NonErgodic"
    UNKNOWN = "Unknown"


def _finite_or_none(value: Optional[float]) -> Any:
    if value is None:
        return None
    return value if math.isfinite(value) else "inf"


@dataclass
class KernelReport:
    """Gate, class membership and ergodicity verdicts for one kernel."""

    spec: KernelSpec
    dalang_ok: bool
    gp_ok: Optional[bool] = None
    fp_ok: Optional[bool] = None
    h_minus1_norm: Optional[float] = None
    lambda_threshold_table: List[Tuple[float, float]] = field(default_factory=list)
    classification: Classification = Classification.UNKNOWN
    mixing_ok: Optional[bool] = None
    p: Optional[float] = None
    dalang: Optional[Dict[str, Any]] = None
    h_minus1: Optional[Dict[str, Any]] = None
    atom: Optional[Dict[str, Any]] = None
    exponents: Optional[Dict[str, Any]] = None
    malliavin: Optional[Dict[str, Any]] = None
    warnings: List[str] = field(default_factory=list)

    @property
    def gate_ok(self) -> bool:
        """Well-posedness gate: Dalang for correlations, G_p (when decided) for base kernels."""
        if not self.dalang_ok:
            return False
        return self.gp_ok is not False

    def invariant_violations(self) -> List[str]:
        problems = []
        if self.gp_ok and self.fp_ok is False:
            problems.append("gp_ok without fp_ok")
        if self.gp_ok and not self.dalang_ok:
            problems.append("gp_ok without dalang_ok")
        return problems

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kernel": self.spec.to_dict(),
            "dalang_ok": self.dalang_ok,
            "gp_ok": self.gp_ok,
            "fp_ok": self.fp_ok,
            "h_minus1_norm": _finite_or_none(self.h_minus1_norm),
            "lambda_table": [[delta, _finite_or_none(lam)] for delta, lam in self.lambda_threshold_table],
            "classification": self.classification.value,
            "mixing_ok": self.mixing_ok,
            "p": self.p,
            "dalang": self.dalang,
            "h_minus1": self.h_minus1,
            "atom": self.atom,
            "exponents": self.exponents,
            "malliavin": self.malliavin,
            "warnings": list(self.warnings),
        }

    def __str__(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2, default=str)
