"""Mild-form solver for the stochastic heat equation."""

from .sigma import SigmaFamily, SigmaSpec
from .field import EnsembleRun, Snapshot, SolutionField, resolve_field
from .scheme import Scheme, apply_heat, heat_factor, step
from .ensemble import RunPlan, gate_check, plan_run, run_block, solve, solve_async
from .picard import PicardResult, picard_solve
from .reference import lognormal_variance, nonergodic_reference

__all__ = [
    "SigmaFamily",
    "SigmaSpec",
    "EnsembleRun",
    "Snapshot",
    "SolutionField",
    "resolve_field",
    "Scheme",
    "apply_heat",
    "heat_factor",
    "step",
    "RunPlan",
    "gate_check",
    "plan_run",
    "run_block",
    "solve",
    "solve_async",
    "PicardResult",
    "picard_solve",
    "lognormal_variance",
    "nonergodic_reference",
]
