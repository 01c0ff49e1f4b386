"""Deterministic integration primitives.

Every integral in the package goes through one of three routines:

* :func:`integrate` -- globally adaptive bisection with 20-point
  Gauss-Legendre panels.  The error of a panel is estimated by comparing
  the one-panel rule with the two-half-panel rule, and the panel with the
  largest estimate is split until the summed estimate meets the tolerance.
* :func:`integrate_semi_infinite` -- truncation of a fast-decaying integrand
  followed by :func:`integrate`.
* :func:`integrate_pv` -- Cauchy principal value by subtracting the pole
  value of the numerator and adding back the logarithm in closed form.

Integrands are called with a 1-D ``numpy`` array of abscissae and may
return real or complex arrays.  Scalar-only callables are tolerated and
are evaluated point by point.
"""

import heapq
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NonConvergence, PoleOnBoundary

GL_ORDER = 20
_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-12
    max_subdivisions: int = 2**16

    def __post_init__(self):
        if not self.abs_tol > 0 or not self.rel_tol > 0:
            raise DomainError("tolerances must be positive")
        if int(self.max_subdivisions) < 1:
            raise DomainError("max_subdivisions must be >= 1")


DEFAULT_SPEC = QuadratureSpec()


def _evaluate(f, x):
    try:
        y = np.asarray(f(x))
    except (TypeError, ValueError):
        y = None
    if y is not None and y.shape == x.shape:
        return y
    if y is not None and y.ndim == 0:
        return np.full(x.shape, y[()])
    return np.array([f(float(t)) for t in x])


def _panel(f, lo, hi):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    return half * (_GL_W @ _evaluate(f, mid + half * _GL_X))


def gauss_legendre_rule(breaks, order=GL_ORDER):
    """Composite Gauss-Legendre nodes and weights over consecutive ``breaks``."""
    breaks = np.asarray(breaks, dtype=float)
    if breaks.ndim != 1 or breaks.size < 2 or np.any(np.diff(breaks) <= 0):
        raise DomainError("breaks must be a strictly increasing sequence")
    x, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * np.diff(breaks)[:, None]
    mid = 0.5 * (breaks[1:] + breaks[:-1])[:, None]
    return (mid + half * x).ravel(), (half * w).ravel()


def adaptive(f, a, b, spec=None):
    """Adaptive integral of ``f`` over ``[a, b]``.

    Returns ``(value, error_estimate, n_panels)``.
    """
    spec = spec or DEFAULT_SPEC
    a = float(a)
    b = float(b)
    if not a < b:
        raise DomainError(f"need a < b, got a={a}, b={b}")

    tie = itertools.count()
    heap = []

    def push(lo, hi, coarse):
        mid = 0.5 * (lo + hi)
        left = _panel(f, lo, mid)
        right = _panel(f, mid, hi)
        err = abs(left + right - coarse)
        heapq.heappush(heap, (-err, next(tie), lo, hi, left, right))
        return err, left + right

    total_err, value = push(a, b, _panel(f, a, b))
    splits = 0
    while True:
        if total_err <= max(spec.abs_tol, spec.rel_tol * abs(value)):
            value = sum(item[4] + item[5] for item in heap)
            return value, total_err, len(heap)
        if splits >= spec.max_subdivisions:
            raise NonConvergence(
                f"adaptive quadrature on [{a}, {b}] stopped after {splits} "
                f"subdivisions with error estimate {total_err:.3e}"
            )
        neg_err, _, lo, hi, left, right = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            raise NonConvergence(f"panel at {lo} cannot be bisected further")
        err_l, fine_l = push(lo, mid, left)
        err_r, fine_r = push(mid, hi, right)
        total_err += neg_err + err_l + err_r
        value += fine_l + fine_r - (left + right)
        splits += 1
        if splits % 256 == 0:
            total_err = math.fsum(-item[0] for item in heap)
            value = sum(item[4] + item[5] for item in heap)


def integrate(f, a, b, spec=None):
    """Integral of ``f`` over ``[a, b]`` to ``max(abs_tol, rel_tol*|I|)``."""
    return adaptive(f, a, b, spec)[0]


def integrate_semi_infinite(f, a=0.0, spec=None, *, cutoff=None, tail_tol=1e-18):
    """Integral of a rapidly decaying ``f`` over ``[a, inf)``.

    The range is truncated at ``cutoff``.  When ``cutoff`` is omitted the
    first point ``a + k`` (k = 1, 2, ...) past which ``|f|`` stays below
    ``tail_tol`` on a sample of ``[a+k, 2(a+k)]`` is used; this is only
    meaningful for integrands that decay monotonically at large argument.
    """
    if cutoff is None:
        cutoff = a + 1.0
        while True:
            probe = np.linspace(cutoff, 2.0 * cutoff + 1.0, 64)
            if np.max(np.abs(_evaluate(f, probe))) < tail_tol:
                break
            cutoff += 1.0
            if cutoff > a + 1e3:
                raise NonConvergence("integrand does not decay below tail_tol")
    return integrate(f, a, cutoff, spec)


def integrate_pv(f, a, b, pole, spec=None):
    """Principal value of the integral of ``f(u)/(u - pole)`` over ``[a, b]``.

    Computed as the integral of ``(f(u) - f(pole))/(u - pole)``, split at
    the pole, plus ``f(pole)*log((b - pole)/(pole - a))``.
    """
    spec = spec or DEFAULT_SPEC
    if not a < pole < b:
        raise PoleOnBoundary(f"pole {pole} not inside ({a}, {b})")
    at_pole = _evaluate(f, np.array([float(pole)]))[0]

    def subtracted(u):
        return (_evaluate(f, u) - at_pole) / (u - pole)

    half = QuadratureSpec(spec.abs_tol / 2, spec.rel_tol, spec.max_subdivisions)
    smooth = integrate(subtracted, a, pole, half) + integrate(subtracted, pole, b, half)
    return smooth + at_pole * math.log((b - pole) / (pole - a))
