"""Commutator-free exponential integrators: order conditions, exact
positivity certificates and a numerical engine."""

__version__ = "0.1.0"

from .conditions import ResidualVector, order_achieved, quadric_residuals, residuals_order5
from .geometry import (
    FeasibilityCertificate,
    IntersectionQuery,
    block_inverse_check,
    certify_no_order5_y,
    check_key_inequality,
    cond1_cond2_agreement,
    ellipsoid_hyperplane_intersect,
    inductive_step_identity,
)
from .integrator import ProblemSpec, amplification_probe, empirical_order, expm_action, integrate, reference_solution, step
from .scheme import (
    DerivedCoefficients,
    Scheme,
    ValidationReport,
    bundled_scheme,
    derive_coefficients,
    derive_from_by,
    dump_scheme,
    load_scheme,
    validate_scheme,
)
from .taylor import exact_flow_coefficients, oracle_residuals, word_coefficients_closed, word_coefficients_recursive
