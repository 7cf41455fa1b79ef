"""Ergodicity and mixing decisions for a correlation f."""

import logging
import math
from typing import Optional, Sequence

import numpy as np

from common.decisions import SequenceVerdict, classify_sequence
from common.errors import PreconditionError
from kernels.analytic import potential_kernel_fourier, potential_kernel_radial
from kernels.conditions import check_Gp
from kernels.correlation import correlation_of
from kernels.potential import dalang_finite
from kernels.report import Classification
from kernels.spec import KernelSpec

from .atoms import DEFAULT_SCALES, AtomDecision, atom_at_zero

logger = logging.getLogger(__name__)

DEFAULT_RADII = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0)


def _require_dalang(spec: KernelSpec, what: str) -> None:
    if not dalang_finite(correlation_of(spec)):
        raise PreconditionError(f"{what}: {spec.label()} fails Dalang's condition")


def ergodicity_predicate(spec: KernelSpec, sigma_constant: bool = False,
                         scales: Sequence[float] = DEFAULT_SCALES) -> Classification:
    """Ergodic iff the spectral atom at 0 vanishes.

    A positive atom proves non-ergodicity only for constant sigma; for
    other sigma the answer is Unknown.
    """
    _require_dalang(spec, "ergodicity_predicate")
    corr = correlation_of(spec)
    if corr.exact_atom_structure:
        has_atom = corr.atom_at_zero > 0
    else:
        estimate = atom_at_zero(spec, scales)
        if estimate.decision == AtomDecision.INCONCLUSIVE:
            return Classification.UNKNOWN
        has_atom = estimate.decision == AtomDecision.ATOM_POSITIVE
    if not has_atom:
        return Classification.ERGODIC
    return Classification.NON_ERGODIC if sigma_constant else Classification.UNKNOWN


def potential_profile(spec: KernelSpec, lam: float, radii: Sequence[float]) -> np.ndarray:
    """(v_lambda * f)(x) at x = r e_1 for each radius."""
    corr = correlation_of(spec)
    d = corr.d
    scale = 1.0 / math.sqrt(2 * lam)
    values = []
    for r in radii:
        x = np.zeros(d)
        x[0] = r
        est = corr.convolve_at(
            lambda s: float(potential_kernel_radial(lam, s, d)),
            lambda z: float(potential_kernel_fourier(lam, z)),
            x, (scale, 10 * scale),
        )
        values.append(est.value)
    return np.asarray(values)


def mixing_predicate(spec: KernelSpec, lam: float = 1.0,
                     radii: Optional[Sequence[float]] = None) -> bool:
    """Whether (v_lambda * f)(x) -> 0 as |x| -> inf."""
    _require_dalang(spec, "mixing_predicate")
    corr = correlation_of(spec)
    if spec.is_h and check_Gp(spec):
        return True
    if corr.exact_atom_structure:
        # any cosine term survives in v_lambda * f; otherwise the spectral
        # measure has a density and Riemann-Lebesgue applies
        return not corr.cosines
    if radii is None:
        radii = [r * max(corr.breakpoints) for r in DEFAULT_RADII]
    values = potential_profile(spec, lam, radii)
    verdict = classify_sequence(list(radii), np.abs(values))
    logger.debug("mixing profile for %s: %s (%s)", spec.label(), values, verdict.value)
    return verdict == SequenceVerdict.DECAYS
