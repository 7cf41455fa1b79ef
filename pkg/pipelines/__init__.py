"""Experiment drivers behind the CLI."""

from .base import EXIT_ERROR, EXIT_GATE, EXIT_OK, BasePipeline, PipelineError, PipelineResult
from .analyze import AnalyzePipeline, build_report
from .simulate import SimulatePipeline
from .islands import IslandsPipeline

__all__ = [
    "EXIT_ERROR",
    "EXIT_GATE",
    "EXIT_OK",
    "BasePipeline",
    "PipelineError",
    "PipelineResult",
    "AnalyzePipeline",
    "build_report",
    "SimulatePipeline",
    "IslandsPipeline",
]
