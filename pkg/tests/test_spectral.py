"""Tests for spectral atoms, ergodicity / mixing predicates and Gaussian covariance."""

import math

import pytest

from common.errors import DomainError, PreconditionError, UnsupportedSpecError
from kernels import Classification, KernelSpec
from kernels.analytic import time_integrated_heat
from spectral import (
    AtomDecision,
    atom_at_frequency,
    atom_at_zero,
    averaged_covariance,
    cesaro_means,
    ergodicity_predicate,
    gaussian_covariance,
    mixing_predicate,
    sandwich,
    triangular_smoother,
)


def test_triangular_smoother_of_constant():
    spec = KernelSpec.constant(0.25, 1)
    for N in (1.0, 10.0, 100.0):
        assert triangular_smoother(spec, N) == pytest.approx(0.25)


def test_triangular_smoother_rejects_nonpositive_scale():
    with pytest.raises(DomainError):
        triangular_smoother(KernelSpec.exp_decay(1.0, 1), 0.0)


@pytest.mark.parametrize("spec", [KernelSpec.exp_decay(1.0, 1), KernelSpec.cosine(1.0, 1)])
def test_atom_zero(spec):
    estimate = atom_at_zero(spec)
    assert estimate.decision == AtomDecision.ATOM_ZERO
    assert estimate.extrapolated_atom == 0.0


@pytest.mark.parametrize("spec,atom", [
    (KernelSpec.cosine(1.0, 1, offset=1.0), 1.0),
    (KernelSpec.constant(0.25, 1), 0.25),
])
def test_atom_positive(spec, atom):
    estimate = atom_at_zero(spec)
    assert estimate.decision == AtomDecision.ATOM_POSITIVE
    assert estimate.extrapolated_atom == pytest.approx(atom, rel=0.1)


def test_atom_at_zero_needs_increasing_scales():
    with pytest.raises(DomainError):
        atom_at_zero(KernelSpec.constant(1.0, 1), scales=[4.0, 2.0, 8.0])


def test_atom_at_frequency_of_cosine():
    assert atom_at_frequency(KernelSpec.cosine(1.0, 1), 1.0) == pytest.approx(0.5, rel=0.05)


def test_cesaro_means_of_constant():
    means = cesaro_means(KernelSpec.constant(0.5, 1), scales=[2.0, 4.0])
    assert means["box"] == pytest.approx([0.5, 0.5])
    assert means["ball"] == pytest.approx([0.5, 0.5])


def test_sandwich_orders_the_smoother():
    lower, mid, upper = sandwich(KernelSpec.exp_decay(1.0, 1), 8.0)
    assert lower <= mid <= upper


def test_ergodicity_predicate():
    assert ergodicity_predicate(KernelSpec.exp_decay(1.0, 1)) == Classification.ERGODIC
    assert ergodicity_predicate(KernelSpec.white_noise(1)) == Classification.ERGODIC
    constant = KernelSpec.constant(0.25, 1)
    assert ergodicity_predicate(constant, sigma_constant=True) == Classification.NON_ERGODIC
    assert ergodicity_predicate(constant, sigma_constant=False) == Classification.UNKNOWN


def test_ergodicity_predicate_requires_dalang():
    with pytest.raises(PreconditionError):
        ergodicity_predicate(KernelSpec.white_noise(2))


def test_mixing_predicate():
    assert mixing_predicate(KernelSpec.exp_decay(1.0, 1)) is True
    assert mixing_predicate(KernelSpec.cosine(1.0, 1)) is False
    assert mixing_predicate(KernelSpec.constant(0.25, 1)) is False
    assert mixing_predicate(KernelSpec.gaussian_h(0.5, 1)) is True


def test_gaussian_covariance_of_white_noise():
    spec = KernelSpec.white_noise(1)
    assert gaussian_covariance(spec, 1.0, math.pi, [0.0]) == pytest.approx(1.0)
    assert gaussian_covariance(spec, 2.0, 1.0, [0.5]) == pytest.approx(
        4.0 * float(time_integrated_heat(1.0, 0.5, 1))
    )
    assert gaussian_covariance(spec, 1.0, 0.0, [0.0]) == 0.0


def test_gaussian_covariance_rejects_bad_inputs():
    spec = KernelSpec.white_noise(1)
    with pytest.raises(DomainError):
        gaussian_covariance(spec, 1.0, -1.0, [0.0])
    with pytest.raises(DomainError):
        gaussian_covariance(spec, 1.0, 1.0, [0.0, 0.0])


def test_gaussian_covariance_decreases_with_distance():
    spec = KernelSpec.gaussian_h(0.5, 1)
    near = gaussian_covariance(spec, 1.0, 1.0, [0.1])
    far = gaussian_covariance(spec, 1.0, 1.0, [3.0])
    assert near > far > 0


def test_averaged_covariance_keeps_the_atom():
    assert averaged_covariance(KernelSpec.constant(0.25, 1), 1.0, 2.0, 10.0) == pytest.approx(0.5, rel=1e-6)


def test_averaged_covariance_is_one_dimensional():
    with pytest.raises(UnsupportedSpecError):
        averaged_covariance(KernelSpec.exp_decay(1.0, 2), 1.0, 1.0, 4.0)
