"""gnlab: a numerical laboratory for Gagliardo-Nirenberg interpolation inequalities.

Exact-rational exponent calculus, grid functions with finite-difference
derivative tensors and L^p quadrature norms, balanced interval covers, and
ratio-based verification of the inequalities with dilation sharpness scans.
"""

from .covering import (
    BalanceProfile,
    BalancedCover,
    alpha,
    balance_profile,
    balancing_radius,
    build_cover,
    cover_sum_bound,
    omega,
)
from .errors import GNLabError
from .exponents import (
    INF,
    AdmissibilityReason,
    AdmissibilityVerdict,
    ExtReal,
    GNParams,
    InequalityRecord,
    NormFactor,
    chain_records,
    check_admissible,
    check_admissible_values,
    gagliardo_balance,
    gagliardo_merged_exponents,
    gagliardo_p,
    gn_record,
    induction_step1_exponents,
    induction_step2_exponents,
    interpolation_alpha,
    parse_rational,
    scaling_deficit,
    solve_p,
    solve_special_p,
    solve_theta,
)
from .gridfn import (
    DerivativeField,
    FamilyKind,
    FamilySpec,
    GridFunction,
    derivative_magnitude,
    dilate,
    from_callable,
    lp_norm,
    mean_value,
    mollify,
    partial_derivative,
    sample_family,
    scaled,
)
from .gridio import export_csv, load_gridfn, save_gridfn
from .verifier import (
    FamilySweep,
    RatioSample,
    VerificationReport,
    estimate_constant,
    gagliardo_modular_check,
    gn21_breakdown,
    gn21_ratio,
    gn_ratio,
    interval_inequality_ratio,
    line_ratio,
    mean_approx_ratio,
    sharpness_scan,
)

__version__ = "0.1.0"
