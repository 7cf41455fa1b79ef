"""Shared exceptions, decision rules and aggregators."""

from .errors import (
    SheLabError,
    DomainError,
    PreconditionError,
    UnsupportedSpecError,
    VacuousBoundError,
    GateFailure,
    BlowUpError,
    ConfigError,
)
from .decisions import SequenceVerdict, classify_sequence, loglog_slope
from .aggregate import RunningMoments, jackknife_variance_stderr, batch_means_variance_stderr

__all__ = [
    "SheLabError",
    "DomainError",
    "PreconditionError",
    "UnsupportedSpecError",
    "VacuousBoundError",
    "GateFailure",
    "BlowUpError",
    "ConfigError",
    "SequenceVerdict",
    "classify_sequence",
    "loglog_slope",
    "RunningMoments",
    "jackknife_variance_stderr",
    "batch_means_variance_stderr",
]
