"""Bose weight g(C) and the moment constants that parameterize the model."""

import math
from dataclasses import dataclass, fields
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .quadrature import integrate, integrate_semi_infinite

# Truncation point for the moment integrals: C**7 * g(C) < 1e-18 beyond it.
C_MAX = 7.0


def weight_g(C):
    """exp(C^2)/(exp(C^2) - 1)^2 for C > 0.

    Written as exp(-t)/expm1(-t)^2 with t = C^2, which neither overflows at
    large C nor cancels at small C (where g ~ 1/C^4).
    """
    C = np.asarray(C, dtype=float)
    if np.any(C <= 0):
        raise DomainError("weight_g is defined for C > 0 only")
    t = C * C
    out = np.exp(-t) / np.expm1(-t) ** 2
    return out[()] if out.ndim == 0 else out


def moment_gn(n):
    """g_n = integral over (0, inf) of C^(5+n) g(C) dC, for n in {0, 1, 2}."""
    if n not in (0, 1, 2):
        raise DomainError(f"moment index must be 0, 1 or 2, got {n!r}")
    return float(integrate_semi_infinite(lambda C: C ** (5 + n) * weight_g(C), 0.0, cutoff=C_MAX))


def moment_g0_log_identity():
    """g_0 through the integration-by-parts form -2 * integral of C ln(1 - exp(-C^2))."""
    return float(integrate(lambda C: -2.0 * C * np.log(-np.expm1(-C * C)), 0.0, C_MAX))


@lru_cache(maxsize=None)
def moments():
    """The three moments (g0, g1, g2), computed once per process."""
    return tuple(moment_gn(n) for n in range(3))


def coupling_g(g0=None, g1=None, g2=None):
    """Coupling 1 - g1^2/(g0 g2); missing moments are computed."""
    if None in (g0, g1, g2):
        c0, c1, c2 = moments()
        g0 = c0 if g0 is None else g0
        g1 = c1 if g1 is None else g1
        g2 = c2 if g2 is None else g2
    return 1.0 - g1 * g1 / (g0 * g2)


@dataclass(frozen=True)
class ModelConstants:
    """Numerical constants of the model, tagged with where they came from.

    ``source`` is ``"computed"`` for values produced by this package and
    ``"reference"`` for the published reference values.
    """

    g0: float
    g1: float
    g2: float
    g: float
    eta0: float
    v0_m1: float
    v1_m1: float
    source: str = "computed"

    def __post_init__(self):
        if self.source not in ("computed", "reference"):
            raise DomainError(f"unknown provenance {self.source!r}")
        if not 0.0 < self.g < 1.0:
            raise DomainError(f"coupling g={self.g} outside (0, 1)")
        if self.g1 <= 0 or self.g2 <= 0:
            raise DomainError("g1 and g2 must be positive")
        if not self.eta0 > 1.0:
            raise DomainError(f"eta0={self.eta0} must lie outside the cut")
        if self.source == "computed" and abs(self.g0 - math.pi**2 / 6) >= 1e-10:
            raise DomainError(f"computed g0={self.g0!r} departs from pi^2/6")

    @property
    def ratio(self):
        """g1/g2, the coupling between the two components."""
        return self.g1 / self.g2

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name != "source"}

    def provenance(self, reference=None):
        """Per-constant comparison ``{name: {computed, reference, difference}}``."""
        reference = reference or REFERENCE_CONSTANTS
        ref = reference.as_dict()
        return {
            name: {"computed": value, "reference": ref[name], "difference": value - ref[name]}
            for name, value in self.as_dict().items()
        }


REFERENCE_CONSTANTS = ModelConstants(
    g0=1.64493,
    g1=2.22912,
    g2=3.60617,
    g=0.96288,
    eta0=1.27573,
    v0_m1=0.71045,
    v1_m1=0.84188,
    source="reference",
)

# Published derived numbers that are not model inputs.
REFERENCE_ONE_MINUS_G = 0.03712
REFERENCE_KAPITSA = 0.58514
REFERENCE_KAPITSA_PI2 = 5.77510
