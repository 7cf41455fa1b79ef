"""Intermittency islands of the parabolic Anderson model."""

from .intermittency import (
    SmoothedMeasure,
    SupGrowthCurve,
    TailFit,
    Window,
    d_alpha,
    island_measure,
    max_alpha,
    nonpositive_replicas,
    smoothed_island_measure,
    sup_constant,
    sup_growth,
    tail_exponent,
    theory_dimension,
    threshold,
)
from .scan import IslandReport, IslandScan, dimension_scan, scan_async, validate_alphas

__all__ = [
    "SmoothedMeasure",
    "SupGrowthCurve",
    "TailFit",
    "Window",
    "d_alpha",
    "island_measure",
    "max_alpha",
    "nonpositive_replicas",
    "smoothed_island_measure",
    "sup_constant",
    "sup_growth",
    "tail_exponent",
    "theory_dimension",
    "threshold",
    "IslandReport",
    "IslandScan",
    "dimension_scan",
    "scan_async",
    "validate_alphas",
]
