"""Spectral atoms, ergodicity and mixing decisions, additive-noise covariance."""

from .atoms import (
    AtomDecision,
    AtomEstimate,
    DEFAULT_SCALES,
    triangular_smoother,
    modulated_triangular,
    box_mass,
    ball_mass,
    cesaro_means,
    sandwich,
    atom_at_zero,
    atom_at_frequency,
)
from .predicates import ergodicity_predicate, mixing_predicate, potential_profile
from .covariance import gaussian_covariance, averaged_covariance

__all__ = [
    "AtomDecision",
    "AtomEstimate",
    "DEFAULT_SCALES",
    "triangular_smoother",
    "modulated_triangular",
    "box_mass",
    "ball_mass",
    "cesaro_means",
    "sandwich",
    "atom_at_zero",
    "atom_at_frequency",
    "ergodicity_predicate",
    "mixing_predicate",
    "potential_profile",
    "gaussian_covariance",
    "averaged_covariance",
]
