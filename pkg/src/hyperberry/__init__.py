"""Exact hypergeometric probabilities, certified normal-approximation
enclosures, and sub-Gaussian Berry-Esseen bound verification."""

from .bounds import (
    BoundProfile,
    ConstantSet,
    GateError,
    bound_profile,
    clt_condition,
    lambda_weight,
    nonuniform_bound,
    proof_traced_constants,
    tail_bound,
    uniform_bound,
)
from .exact import (
    ExactProb,
    Moments,
    RATIONAL_N_MAX,
    cdf_exact,
    dual_leftover,
    dual_reflect,
    mode,
    moments,
    pmf_exact,
    sf_exact,
)
from .grids import SweepGrid, load_grid_config, parse_grid_config
from .lab import (
    DeltaReport,
    calibrate_constants,
    clt_experiment,
    delta_exact,
    delta_star_at,
    duality_suite,
    optimality_check,
    tail_two_sided,
)
from .params import HypParams
from .stirling import (
    ApplicabilityError,
    CertifiedProb,
    Standardized,
    StirlingEps,
    certified_pmf,
    check_applicability,
    gaussian_main_term,
    standardize,
    stirling_eps_bounds,
)

__all__ = [
    "ApplicabilityError",
    "BoundProfile",
    "CertifiedProb",
    "ConstantSet",
    "DeltaReport",
    "ExactProb",
    "GateError",
    "HypParams",
    "Moments",
    "RATIONAL_N_MAX",
    "Standardized",
    "StirlingEps",
    "SweepGrid",
    "bound_profile",
    "calibrate_constants",
    "cdf_exact",
    "certified_pmf",
    "check_applicability",
    "clt_condition",
    "clt_experiment",
    "delta_exact",
    "delta_star_at",
    "dual_leftover",
    "dual_reflect",
    "duality_suite",
    "gaussian_main_term",
    "lambda_weight",
    "load_grid_config",
    "mode",
    "moments",
    "nonuniform_bound",
    "optimality_check",
    "parse_grid_config",
    "pmf_exact",
    "proof_traced_constants",
    "sf_exact",
    "standardize",
    "stirling_eps_bounds",
    "tail_bound",
    "tail_two_sided",
    "uniform_bound",
]

__version__ = "0.1.0"
