"""Solver and verification toolkit for a fourth-order beam problem whose
left end is pinned to a weighted average of the whole deflection profile.

The pieces: an expression parser for nonlinearities f(t, u), the explicit
kernel of the linear problem with its bound constants, a product-quadrature
discretization of the integral operator with Picard/Newton iterations, an
independent shooting method, and mechanical checks of the structural and
growth hypotheses behind the existence and multiplicity results.
"""

from .config import ProblemConfig, config_from_dict, load_config
from .errors import (
    ArityError,
    BeamBVPError,
    ConfigError,
    DivergenceError,
    DomainError,
    EvalDomainError,
    ExprError,
    ExprSyntaxError,
    NoConvergenceError,
    NonFiniteError,
    SingularJacobianError,
    StructuralError,
    UnknownIdentifierError,
)
from .examples import EXAMPLE_TAGS, fixture_path, load_example, run_criteria
from .expr import diff_u, evaluate, parse, to_string
from .grid import GridFunction
from .hammerstein import (
    SolveResult,
    SolveSettings,
    apply_T,
    assemble_operator_matrix,
    find_positive_solutions,
    newton_solve,
    picard_solve,
    refine_solution,
)
from .hypotheses import (
    HypothesisReport,
    LimitEstimate,
    check_boundary_conditions,
    check_H1_H2_H3_H5,
    check_H4,
    check_H6,
    check_structural,
    cone_check,
    estimate_limit,
    verify_solution,
)
from .kernel import (
    DEFAULT_THETA,
    ConstantsReport,
    ProblemSpec,
    compute_k,
    constants_report,
    e_bound,
    green_G,
    green_H,
    integral_G_over_t,
    psi_constant,
    rho_bound,
)
from .quadrature import QuadratureRule, integrate, nodes_weights
from .shooting import (
    ShootingState,
    integrate_ivp,
    scan_and_refine,
    shoot_residual,
    solution_from_root,
)

__version__ = "0.1.0"

__all__ = [
    "ProblemConfig", "config_from_dict", "load_config",
    "ArityError", "BeamBVPError", "ConfigError", "DivergenceError",
    "DomainError", "EvalDomainError", "ExprError", "ExprSyntaxError",
    "NoConvergenceError", "NonFiniteError", "SingularJacobianError",
    "StructuralError", "UnknownIdentifierError",
    "EXAMPLE_TAGS", "fixture_path", "load_example", "run_criteria",
    "diff_u", "evaluate", "parse", "to_string",
    "GridFunction",
    "SolveResult", "SolveSettings", "apply_T", "assemble_operator_matrix",
    "find_positive_solutions", "newton_solve", "picard_solve",
    "refine_solution",
    "HypothesisReport", "LimitEstimate", "check_boundary_conditions",
    "check_H1_H2_H3_H5", "check_H4", "check_H6", "check_structural",
    "cone_check", "estimate_limit", "verify_solution",
    "DEFAULT_THETA", "ConstantsReport", "ProblemSpec", "compute_k",
    "constants_report", "e_bound", "green_G", "green_H",
    "integral_G_over_t", "psi_constant", "rho_bound",
    "QuadratureRule", "integrate", "nodes_weights",
    "ShootingState", "integrate_ivp", "scan_and_refine", "shoot_residual",
    "solution_from_root",
    "__version__",
]
