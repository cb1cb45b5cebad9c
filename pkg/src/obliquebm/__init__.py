"""Simulation and verification toolkit for planar Brownian motion confined
to the nonnegative quadrant by oblique electrostatic (1/x-type) repulsion.

The system is

    X_t = X_0 + B_t + alpha * int_0^t ds/X_s + beta  * int_0^t ds/Y_s [- mu t]
    Y_t = Y_0 + C_t + gamma * int_0^t ds/X_s + delta * int_0^t ds/Y_s [- nu t]

with alpha, delta > 0.  The package provides regime classification (corner
polarity, wall hitting, existence/uniqueness), positivity-preserving path
simulation with reproducible parallel streams, the gamma-product stationary
law and its goodness-of-fit checks, and the noise-free singular system with
its closed-form square-root profile.
"""

from .deterministic import (
    ClosedForm,
    NoDeterministicSolution,
    NonPositiveInputs,
    PerturbedStart,
    SignBranch,
    SqrtProfile,
    Unique,
    UniquenessVerdict,
    comparison_solve,
    integrate_deterministic,
    sqrt_profile,
    uniqueness_verdict,
    zero_alpha_delta_family,
)
from .experiment import (
    Experiment,
    ExperimentKind,
    HittingStats,
    MissingRequiredKey,
    MonteCarloResult,
    ParseError,
    UnknownKey,
    hitting_experiment,
    parse_config,
    run_monte_carlo,
    wilson_halfwidth,
)
from .integrator import (
    ImplicitBessel,
    NumericFailure,
    RefusedNoSolutionRegime,
    SchemeRegimeMismatch,
    SimConfig,
    TruncatedHn,
    TruncatedPsi,
    implicit_bessel_substep,
    rescale_path,
    rescaled_config,
    simulate_path,
    simulate_truncated,
    step,
)
from .model import (
    Drift,
    NonFiniteParameter,
    NonPositiveAlphaDelta,
    ParameterError,
    Params,
    PathSample,
    RngStream,
    SimGrid,
    State,
    ZERO_DRIFT,
    gaussian_increments,
    validate_drift,
    validate_params,
)
from .regimes import (
    CornerReport,
    CornerVerdict,
    ExistenceCase,
    ExistenceRegime,
    ExistenceReport,
    NonPositiveWeights,
    RegimeReport,
    SideReport,
    SideVerdict,
    c3_holds_at,
    check_c1,
    check_c2,
    classify,
    classify_corner,
    classify_existence,
    classify_sides,
    search_c3,
)
from .stationary import (
    EmptySample,
    FitReport,
    GammaProduct,
    GeneratorCoefficients,
    NonIntegrableStationary,
    SkewSymmetryViolated,
    default_burn_in,
    ergodic_sample,
    fit_check,
    gamma_cdf,
    gamma_product_params,
    generator_coefficients,
    skew_symmetry,
)

__version__ = "0.1.0"

__all__ = [
    "ZERO_DRIFT",
    "ClosedForm",
    "CornerReport",
    "CornerVerdict",
    "Drift",
    "EmptySample",
    "ExistenceCase",
    "ExistenceRegime",
    "ExistenceReport",
    "Experiment",
    "ExperimentKind",
    "FitReport",
    "GammaProduct",
    "GeneratorCoefficients",
    "HittingStats",
    "ImplicitBessel",
    "MissingRequiredKey",
    "MonteCarloResult",
    "NoDeterministicSolution",
    "NonFiniteParameter",
    "NonIntegrableStationary",
    "NonPositiveAlphaDelta",
    "NonPositiveInputs",
    "NonPositiveWeights",
    "NumericFailure",
    "ParameterError",
    "Params",
    "ParseError",
    "PathSample",
    "PerturbedStart",
    "RefusedNoSolutionRegime",
    "RegimeReport",
    "RngStream",
    "SchemeRegimeMismatch",
    "SideReport",
    "SideVerdict",
    "SignBranch",
    "SimConfig",
    "SimGrid",
    "SkewSymmetryViolated",
    "SqrtProfile",
    "State",
    "TruncatedHn",
    "TruncatedPsi",
    "Unique",
    "UniquenessVerdict",
    "UnknownKey",
    "c3_holds_at",
    "check_c1",
    "check_c2",
    "classify",
    "classify_corner",
    "classify_existence",
    "classify_sides",
    "comparison_solve",
    "default_burn_in",
    "ergodic_sample",
    "fit_check",
    "gamma_cdf",
    "gamma_product_params",
    "gaussian_increments",
    "generator_coefficients",
    "hitting_experiment",
    "implicit_bessel_substep",
    "integrate_deterministic",
    "parse_config",
    "rescale_path",
    "rescaled_config",
    "run_monte_carlo",
    "search_c3",
    "simulate_path",
    "simulate_truncated",
    "skew_symmetry",
    "sqrt_profile",
    "step",
    "uniqueness_verdict",
    "validate_drift",
    "validate_params",
    "wilson_halfwidth",
    "zero_alpha_delta_family",
]
