"""Experiment configuration: schema, TOML loader and environment defaults."""

from .schema import (
    ANALYSES,
    AnalysisConfig,
    ExperimentConfig,
    IslandsConfig,
    SolverConfig,
    StatsConfig,
    config_hash,
    parse_config,
)
from .loader import VERSION, Settings, load_config, resolve_output, resolve_threads

__all__ = [
    "ANALYSES",
    "AnalysisConfig",
    "ExperimentConfig",
    "IslandsConfig",
    "SolverConfig",
    "StatsConfig",
    "config_hash",
    "parse_config",
    "VERSION",
    "Settings",
    "load_config",
    "resolve_output",
    "resolve_threads",
]
