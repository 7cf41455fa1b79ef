"""Analytic evaluation and classification of base kernels and correlations."""

from .spec import Family, KernelKind, KernelSpec
from .analytic import (
    omega_d,
    heat_kernel,
    potential_kernel,
    potential_kernel_quad,
    time_integrated_heat,
)
from .correlation import Correlation, CosineTerm, correlation_of
from .conditions import (
    ConditionExponents,
    HMinus1,
    f_from_h,
    condition_exponents,
    condition_integral,
    check_Gp,
    check_Fp,
    default_p,
    pd_tail_bound,
    pd_tail_sup,
    pd_integral_ratio,
    fit_pd_integral_constant,
    h_minus1_norm,
)
from .potential import DalangIntegral, dalang_integral, potential_integral, lambda_threshold, lambda_table
from .bounds import (
    MomentBound,
    MalliavinBound,
    HIterates,
    z_k,
    moment_bound,
    kappa,
    cumulative_kappa,
    h_iterates,
    H_bound,
    malliavin_bound,
)
from .report import Classification, KernelReport

__all__ = [
    "Family",
    "KernelKind",
    "KernelSpec",
    "omega_d",
    "heat_kernel",
    "potential_kernel",
    "potential_kernel_quad",
    "time_integrated_heat",
    "Correlation",
    "CosineTerm",
    "correlation_of",
    "ConditionExponents",
    "HMinus1",
    "f_from_h",
    "condition_exponents",
    "condition_integral",
    "check_Gp",
    "check_Fp",
    "default_p",
    "pd_tail_bound",
    "pd_tail_sup",
    "pd_integral_ratio",
    "fit_pd_integral_constant",
    "h_minus1_norm",
    "DalangIntegral",
    "dalang_integral",
    "potential_integral",
    "lambda_threshold",
    "lambda_table",
    "MomentBound",
    "MalliavinBound",
    "HIterates",
    "z_k",
    "moment_bound",
    "kappa",
    "cumulative_kappa",
    "h_iterates",
    "H_bound",
    "malliavin_bound",
    "Classification",
    "KernelReport",
]
