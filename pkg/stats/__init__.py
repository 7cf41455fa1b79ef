"""Spatial-average statistics: Poincare bound, ergodicity test, covariance decay."""

from .functionals import (
    AverageSpec,
    GFamily,
    LipschitzFactor,
    product_field,
    snap_shift,
    spatial_average,
)
from .poincare import MIN_REPLICAS, PoincareCheck, correlation_mass, variance_vs_N
from .ergodicity import (
    DecayCurve,
    ErgodicityResult,
    ErgodicityVerdict,
    MemberResult,
    covariance_decay,
    default_suite,
    ergodicity_test,
    validate_suite,
)

__all__ = [
    "AverageSpec",
    "GFamily",
    "LipschitzFactor",
    "product_field",
    "snap_shift",
    "spatial_average",
    "MIN_REPLICAS",
    "PoincareCheck",
    "correlation_mass",
    "variance_vs_N",
    "DecayCurve",
    "ErgodicityResult",
    "ErgodicityVerdict",
    "MemberResult",
    "covariance_decay",
    "default_suite",
    "ergodicity_test",
    "validate_suite",
]
