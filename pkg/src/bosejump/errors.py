"""Exception hierarchy shared by all bosejump modules."""


class BoseJumpError(Exception):
    """Base class for every error raised by the package."""


class DomainError(BoseJumpError, ValueError):
    """Argument outside the domain of an operation."""


class OnCut(DomainError):
    """Point lies on a branch cut; use the boundary-value variant instead."""


class PoleOnBoundary(DomainError):
    """Principal-value pole is not strictly inside the integration interval."""


class PoleError(DomainError):
    """Evaluation requested at a pole of the solution."""


class SingularAtOrigin(DomainError):
    """Matrix function is singular at z = 0."""


class InvalidParams(DomainError):
    """Physical parameters violate their invariants."""


class NoRoot(BoseJumpError):
    """No sign change found inside the requested bracket."""


class NonConvergence(BoseJumpError):
    """An iterative or adaptive procedure exhausted its budget."""


class InconsistentSolve(BoseJumpError):
    """Solved coefficients fail the solvability identities."""


class GridTooCoarse(BoseJumpError):
    """Discrete solution violates flux conservation beyond the allowed level."""


class GridMismatch(BoseJumpError):
    """Two solutions cannot be compared on a common grid."""
