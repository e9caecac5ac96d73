"""Central values and central derivatives of twisted canonical Hecke L-functions
of imaginary quadratic fields, with numerically solved root numbers."""

from .backend import backend_name, numba_enabled
from .central import (
    CentralReport,
    C_term,
    I1,
    I2,
    Rk,
    central_derivative,
    central_report,
    central_value,
    lambda_smoothed,
    root_number,
)
from .characters import (
    EpsCharacter,
    EpsFactorization,
    build_canonical,
    chi_value,
    eps_value,
    factor_eps,
    make_characters,
    twist_character,
    validate_character,
)
from .charsums import CharSumRecord, char_sum, dyadic_consistency, ratio_survey, \
    reduction_identity_check
from .dirichlet import (
    L_D_at_1,
    L_D_derivative_at_1,
    an_coefficients,
    lambda_k_derivative_at_1,
)
from .kernels import (
    AccuracyBudget,
    complex_inc_gamma,
    inc_gamma_ratio,
    log_kernel,
    log_weight_integral,
    vertical_line_integral,
    zeta_line,
)
from .quadfield import (
    IdealZModule,
    LatticePoint,
    QuadraticField,
    class_number,
    ideal_from_generators,
    is_fundamental_discriminant,
    kronecker,
    principal_lattice_points,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyBudget", "CentralReport", "CharSumRecord", "EpsCharacter",
    "EpsFactorization", "IdealZModule", "LatticePoint", "QuadraticField",
    "C_term", "I1", "I2", "Rk", "an_coefficients", "backend_name",
    "build_canonical", "central_derivative", "central_report", "central_value",
    "char_sum", "chi_value", "class_number", "complex_inc_gamma",
    "dyadic_consistency", "eps_value", "factor_eps", "ideal_from_generators",
    "inc_gamma_ratio", "is_fundamental_discriminant", "kronecker",
    "L_D_at_1", "L_D_derivative_at_1", "lambda_k_derivative_at_1",
    "lambda_smoothed", "log_kernel", "log_weight_integral", "make_characters",
    "numba_enabled", "principal_lattice_points", "ratio_survey",
    "reduction_identity_check", "root_number", "twist_character",
    "validate_character", "vertical_line_integral", "zeta_line",
]
