"""Numerical toolkit for the k-Hessian principal eigenvalue on balls.

Cone algebra for elementary symmetric polynomials, matrix admissibility,
radial calculus with exact-quadrature Dirichlet solves, boundary-barrier
verification near curved boundaries, and the monotone iteration that
brackets the principal eigenvalue.
"""

from .cones import (
    AdmissibleJet,
    as_symmetric,
    classical_subsolution_at,
    classical_supersolution_at,
    eigenvalues,
    in_dual_sigma_k,
    in_sigma_k,
    load_matrix_json,
    membership_slack,
    s_k_op,
    save_matrix_json,
)
from .dirichlet import (
    SolverConfig,
    SourceTerm,
    classical_comparison_check,
    fd_witness_residual,
    first_integral_solve,
    holder_seminorm,
    make_grid,
    solution_residual,
    solve_radial_dirichlet,
    verify_boundary_growth,
)
from .eigen import (
    IterationConfig,
    IterationResult,
    SpectralEstimate,
    domain_monotonicity_check,
    estimate_lambda1,
    iterate_fixed_lambda,
    lower_bound,
    minimum_principle_probe,
    rayleigh_quotient,
    thread_cap,
    upper_bound,
)
from .errors import (
    ConvergenceError,
    DomainError,
    InconsistencyError,
    KHessianError,
    SearchError,
)
from .geometry import (
    CurvatureField,
    TubeSpec,
    augment_r,
    ellipsoid_field,
    hess_dist_spectrum,
    load_field_json,
    s_j_composition,
    save_field_json,
    sphere_field,
    strictly_km1_convex,
    verify_exp_boundary_barrier,
    verify_log_boundary_barrier,
)
from .radial import (
    BarrierParams,
    RadialProfile,
    exp_barrier_profile,
    exp_barrier_rate_floor,
    hopf_linear_bound,
    quartic_test_profile,
    radial_hessian_spectrum,
    residual_scale,
    s_j_radial_power,
    s_k_on_profile,
    s_k_radial,
    s_k_radial_origin,
    s_k_radial_split,
    two_path_agreement,
)
from .symfun import (
    garding_poly_coeffs,
    garding_roots_real,
    in_gamma_k,
    in_gamma_k_korevaar,
    sigma_all,
    sigma_k,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibleJet",
    "BarrierParams",
    "ConvergenceError",
    "CurvatureField",
    "DomainError",
    "InconsistencyError",
    "IterationConfig",
    "IterationResult",
    "KHessianError",
    "RadialProfile",
    "SearchError",
    "SolverConfig",
    "SourceTerm",
    "SpectralEstimate",
    "TubeSpec",
    "as_symmetric",
    "augment_r",
    "classical_comparison_check",
    "classical_subsolution_at",
    "classical_supersolution_at",
    "domain_monotonicity_check",
    "eigenvalues",
    "ellipsoid_field",
    "estimate_lambda1",
    "fd_witness_residual",
    "exp_barrier_profile",
    "exp_barrier_rate_floor",
    "first_integral_solve",
    "garding_poly_coeffs",
    "garding_roots_real",
    "hess_dist_spectrum",
    "holder_seminorm",
    "hopf_linear_bound",
    "in_dual_sigma_k",
    "in_gamma_k",
    "in_gamma_k_korevaar",
    "in_sigma_k",
    "iterate_fixed_lambda",
    "load_field_json",
    "load_matrix_json",
    "lower_bound",
    "make_grid",
    "membership_slack",
    "minimum_principle_probe",
    "quartic_test_profile",
    "radial_hessian_spectrum",
    "rayleigh_quotient",
    "residual_scale",
    "s_j_composition",
    "s_j_radial_power",
    "s_k_on_profile",
    "s_k_op",
    "s_k_radial",
    "s_k_radial_origin",
    "s_k_radial_split",
    "save_field_json",
    "save_matrix_json",
    "sigma_all",
    "sigma_k",
    "solution_residual",
    "solve_radial_dirichlet",
    "sphere_field",
    "strictly_km1_convex",
    "thread_cap",
    "two_path_agreement",
    "upper_bound",
    "verify_boundary_growth",
    "verify_exp_boundary_barrier",
    "verify_log_boundary_barrier",
]
