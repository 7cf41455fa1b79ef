"""Noise synthesis on periodic grids."""

from .grid import Grid
from .rng import DEFAULT_BATCH_SIZE, RandomStreams
from .synthesis import (
    ColoringPlan,
    CovarianceCurve,
    NoiseSlice,
    clear_plans,
    color_by_h,
    color_by_spectrum,
    coloring_plan,
    empirical_covariance,
    h_plan,
    origin_cell_average,
    sample_white,
    spectrum_plan,
)
from .dump import HEADER_SIZE, dump_bytes, load_bytes

__all__ = [
    "Grid",
    "DEFAULT_BATCH_SIZE",
    "RandomStreams",
    "ColoringPlan",
    "CovarianceCurve",
    "NoiseSlice",
    "clear_plans",
    "color_by_h",
    "color_by_spectrum",
    "coloring_plan",
    "empirical_covariance",
    "h_plan",
    "origin_cell_average",
    "sample_white",
    "spectrum_plan",
    "HEADER_SIZE",
    "dump_bytes",
    "load_bytes",
]
