"""Kernel analysis: gate, class membership, ergodicity and mixing verdicts."""

import logging
from typing import Optional, Sequence

import numpy as np

from common.errors import GateFailure, SheLabError
from kernels import (
    KernelReport,
    KernelSpec,
    check_Fp,
    check_Gp,
    condition_exponents,
    dalang_integral,
    default_p,
    h_minus1_norm,
    lambda_table,
    malliavin_bound,
)
from spectral import atom_at_zero, ergodicity_predicate, mixing_predicate

from .base import BasePipeline

logger = logging.getLogger(__name__)

REPORT_PATH = "report.json"

# (s, t, T) at which the derivative bound is reported, with k = 2 and C_{T,k} = 1
DERIVATIVE_TIMES = (0.5, 1.0, 2.0)


def build_report(spec: KernelSpec, sigma_constant: bool = False, lam: float = 1.0,
                 deltas: Sequence[float] = (0.1, 0.5, 1.0), p: Optional[float] = None) -> KernelReport:
    """Evaluate every analytic predicate for one kernel.

    Predicates that need Dalang's condition are skipped when it fails; the
    classification then stays Unknown.
    """
    dalang = dalang_integral(spec, lam)
    report = KernelReport(spec, dalang_ok=dalang.finite, dalang=dalang.to_dict())
    if dalang.flagged:
        report.warnings.append(f"quadrature of the Dalang integral was flagged for {spec.label()}")

    if spec.is_h:
        report.p = default_p(spec) if p is None else p
        report.exponents = condition_exponents(spec, report.p).to_dict()
        report.gp_ok = check_Gp(spec, report.p)
        report.fp_ok = check_Fp(spec, report.p)
        norm = h_minus1_norm(spec)
        report.h_minus1_norm = norm.potential_form
        report.h_minus1 = norm.to_dict()
        if report.gp_ok is False:
            report.warnings.append("Lambda_h is undefined outside G_p")
        else:
            report.lambda_threshold_table = lambda_table(spec, deltas)

    if not report.dalang_ok:
        return report

    report.classification = ergodicity_predicate(spec, sigma_constant)
    report.mixing_ok = mixing_predicate(spec, lam)
    try:
        report.atom = atom_at_zero(spec).to_dict()
    except SheLabError as e:
        report.warnings.append(f"atom_at_zero: {e}")

    s, t, horizon = DERIVATIVE_TIMES
    origin = np.zeros(spec.d)
    try:
        report.malliavin = malliavin_bound(spec, t, s, origin, origin, k=2.0, T=horizon, C_Tk=1.0).to_dict()
    except SheLabError as e:
        report.warnings.append(f"malliavin_bound: {e}")

    for problem in report.invariant_violations():
        report.warnings.append(f"inconsistent report: {problem}")
    for w in report.warnings:
        logger.warning(w)
    return report


class AnalyzePipeline(BasePipeline):
    """Write the KernelReport of the configured kernel.

    The report is written even when the gate fails; the run then ends with
    exit code 2.
    """

    operation = "analyze"

    async def execute(self) -> KernelReport:
        cfg = self.config
        report = build_report(
            cfg.kernel,
            sigma_constant=cfg.analysis.sigma_constant,
            lam=cfg.analysis.lam,
            deltas=cfg.analysis.deltas,
        )
        await self.write_json(REPORT_PATH, report.to_dict(), "kernel_report")
        self.warnings.extend(report.warnings)
        if not report.gate_ok:
            reason = "Dalang's condition fails" if not report.dalang_ok else "kernel is not in G_p"
            raise GateFailure(f"{cfg.kernel.label()}: {reason}")
        return report
