"""Temperature jump at the boundary of a degenerate Bose gas.

Modules, bottom up: ``quadrature`` (integration primitives),
``bose_moments`` (model constants), ``dispersion`` (dispersion functions and
discrete spectrum), ``factorization`` (factor functions of the boundary
problem), ``jump_solver`` (coefficients, field and Kapitsa resistance),
``oracle`` (independent discrete-ordinates solver) and ``cli``.
"""

from .bose_moments import ModelConstants, coupling_g, moment_gn, moments, weight_g
from .dispersion import Dispersion, default_dispersion
from .errors import (
    BoseJumpError,
    DomainError,
    GridMismatch,
    GridTooCoarse,
    InconsistentSolve,
    InvalidParams,
    NonConvergence,
    NoRoot,
    OnCut,
    PoleError,
    PoleOnBoundary,
    SingularAtOrigin,
)
from .factorization import Factorization, default_factorization
from .jump_solver import (
    JumpSolver,
    PhysicalParams,
    SolutionCoefficients,
    eval_h,
    kapitsa_coefficient,
    kapitsa_resistance,
    model_constants,
    solve_coefficients,
    temperature_jump,
    validity_threshold,
)
from .oracle import compare_with_analytic, solve_halfspace
from .quadrature import QuadratureSpec, integrate, integrate_pv, integrate_semi_infinite

__version__ = "0.1.0"
