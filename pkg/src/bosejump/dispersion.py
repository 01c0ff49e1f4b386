"""Dispersion functions, their boundary values on the cut, and the discrete spectrum.

``lambda0(z) = 1 + (z/2) * integral_{-1}^{1} du/(u - z)`` and
``lambda1(z) = 1 + 3 g z^2 lambda0(z)``.  Both are analytic off the cut
[-1, 1] and even in z.  On the cut the boundary values from above and
below differ by the Sokhotski jump of the Cauchy integral:
``lambda0^± = lambda0 ± i*pi*mu/2`` and hence
``lambda1^± = lambda1 ± (3/2)*i*pi*g*mu^3``.
"""

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from scipy.optimize import brentq

from .bose_moments import coupling_g, moments
from .errors import DomainError, NonConvergence, NoRoot, OnCut, SingularAtOrigin
from .quadrature import gauss_legendre_rule

LAMBDA0 = "lambda0"
LAMBDA1 = "lambda1"
ZETA0 = "zeta0"
ZETA1 = "zeta1"

# Order of the zero at infinity (lambda0 ~ -1/(3 z^2); lambda1 -> 1 - g).
_ORDER_AT_INFINITY = {LAMBDA0: 2, LAMBDA1: 0}
_SERIES_RADIUS = 4.0
_SERIES_TERMS = 16


def _which_index(which):
    if which in (0, LAMBDA0, ZETA0):
        return 0
    if which in (1, LAMBDA1, ZETA1):
        return 1
    raise DomainError(f"unknown dispersion function {which!r}")


def _off_cut(z, lo=-1.0):
    z = np.asarray(z, dtype=complex)
    bad = (z.imag == 0) & (z.real >= lo) & (z.real <= 1.0) & (z != 0)
    if np.any(bad):
        raise OnCut(f"z={z[bad].ravel()[0]} lies on the cut [{lo:g}, 1]")
    return z


def lambda0(z):
    """lambda0 off the cut; z = 0 returns its limit 1."""
    z = _off_cut(z)
    out = np.ones_like(z)
    far = np.abs(z) > _SERIES_RADIUS
    near = ~far & (z != 0)
    zn = z[near]
    out[near] = 1.0 - 0.5 * zn * (np.log(zn + 1.0) - np.log(zn - 1.0))
    # -sum_k z^(-2k)/(2k+1) avoids the cancellation of the closed form.
    w = 1.0 / z[far] ** 2
    acc = np.zeros_like(w)
    for k in range(_SERIES_TERMS, 0, -1):
        acc = w * (1.0 / (2 * k + 1) + acc)
    out[far] = -acc
    return out[()] if out.ndim == 0 else out


def lambda0_pv(mu):
    """Real part of lambda0 on the cut: 1 - mu*artanh(mu)."""
    mu = np.asarray(mu, dtype=float)
    with np.errstate(divide="ignore"):
        out = 1.0 - mu * np.arctanh(mu)
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class DispersionValue:
    z: complex
    lambda0: complex
    lambda1: complex


@dataclass(frozen=True)
class BoundaryValue:
    mu: float
    plus: complex
    minus: complex
    which: str

    @property
    def jump(self):
        return self.plus - self.minus


@dataclass(frozen=True)
class AngleTable:
    """Angle function sampled on a composite Gauss-Legendre rule over (0, 1).

    ``nodes``/``weights`` integrate smooth functions on (0, 1); the rule is
    graded geometrically toward both endpoints.
    """

    which: str
    nodes: np.ndarray
    weights: np.ndarray
    values: np.ndarray

    @property
    def theta(self):
        return self.values + np.pi


@lru_cache(maxsize=None)
def angle_rule(n_uniform=64, grade0=14, grade1=36):
    """Nodes and weights of the graded composite rule used by angle tables.

    The finest panel next to u = 1 is kept wide enough that every node is
    representable as a float strictly below 1.
    """
    h = 1.0 / n_uniform
    inner = np.linspace(h, 1.0 - h, n_uniform - 1)
    left = h * 2.0 ** -np.arange(grade0, 0, -1)
    right = 1.0 - h * 2.0 ** -np.arange(1, grade1 + 1)
    breaks = np.concatenate([[0.0], left, inner, right, [1.0]])
    nodes, weights = gauss_legendre_rule(breaks)
    if nodes[0] <= 0.0 or nodes[-1] >= 1.0:
        raise DomainError("angle rule grading too fine for double precision")
    return nodes, weights


class Dispersion:
    """Dispersion functions for a given coupling.

    ``g`` is the coupling 1 - g1^2/(g0 g2) and ``ratio`` is g1/g2; both
    default to the values computed from the Bose moments.
    """

    def __init__(self, g=None, ratio=None):
        if g is None or ratio is None:
            g0, g1, g2 = moments()
            g = coupling_g(g0, g1, g2) if g is None else g
            ratio = g1 / g2 if ratio is None else ratio
        self.g = float(g)
        self.ratio = float(ratio)

    # -- functions off the cut ------------------------------------------------

    def lambda0(self, z):
        return lambda0(z)

    def lambda1(self, z):
        z = np.asarray(z, dtype=complex)
        out = 1.0 + 3.0 * self.g * z * z * lambda0(z)
        return out[()] if out.ndim == 0 else out

    def dispersion_function(self, z):
        """lambda(z) = det Lambda(z) = lambda0 * lambda1."""
        return self.lambda0(z) * self.lambda1(z)

    def evaluate(self, z):
        z = complex(z)
        return DispersionValue(z, complex(self.lambda0(z)), complex(self.lambda1(z)))

    def D(self, s):
        """Matrix D(s) = [[3 g s, 0], [g1/g2, 1]], broadcast over s."""
        s = np.asarray(s)
        out = np.zeros(s.shape + (2, 2), dtype=np.result_type(s, float))
        out[..., 0, 0] = 3.0 * self.g * s
        out[..., 1, 0] = self.ratio
        out[..., 1, 1] = 1.0
        return out

    @property
    def D0(self):
        return np.array([[1.0, 0.0], [-self.ratio, 0.0]])

    def dispersion_matrix(self, z):
        """Lambda(z) with elements [[lambda1, 0], [r(lambda0 - 1), lambda0]]."""
        l0 = np.asarray(self.lambda0(z))
        return self._Lambda_from(l0, 1.0 + 3.0 * self.g * np.asarray(z) ** 2 * l0)

    def _Lambda_from(self, l0, l1):
        out = np.zeros(l0.shape + (2, 2), dtype=complex)
        out[..., 0, 0] = l1
        out[..., 1, 0] = self.ratio * (l0 - 1.0)
        out[..., 1, 1] = l0
        return out

    def _P_from(self, z, l0, l1):
        out = np.zeros(np.shape(l0) + (2, 2), dtype=complex)
        out[..., 0, 0] = l1 / (3.0 * self.g * z * z)
        out[..., 1, 0] = -self.ratio / (3.0 * self.g * z * z)
        out[..., 1, 1] = l0
        return out

    def matrix_P(self, z):
        """P(z) = Lambda(z) D^{-1}(z^2)."""
        z = np.asarray(z, dtype=complex)
        if np.any(z == 0):
            raise SingularAtOrigin("P(z) is singular at z = 0")
        l0 = np.asarray(self.lambda0(z))
        return self._P_from(z, l0, 1.0 + 3.0 * self.g * z * z * l0)

    # -- boundary values on the cut ---------------------------------------

    def lambda1_pv(self, mu):
        mu = np.asarray(mu, dtype=float)
        with np.errstate(invalid="ignore"):
            out = 1.0 + 3.0 * self.g * mu * mu * lambda0_pv(mu)
        return out[()] if out.ndim == 0 else out

    def boundary_imag(self, mu, which):
        """Imaginary part of the upper boundary value."""
        mu = np.asarray(mu, dtype=float)
        if _which_index(which) == 0:
            return 0.5 * np.pi * mu
        return 1.5 * np.pi * self.g * mu**3

    def _pv(self, mu, which):
        return lambda0_pv(mu) if _which_index(which) == 0 else self.lambda1_pv(mu)

    def boundary_values(self, mu, which):
        """Vectorized (plus, minus) boundary values for mu in (-1, 1)."""
        mu = np.asarray(mu, dtype=float)
        if np.any(np.abs(mu) >= 1.0):
            raise DomainError("boundary values need |mu| < 1")
        re = self._pv(mu, which)
        im = self.boundary_imag(mu, which)
        return re + 1j * im, re - 1j * im

    def lambda_boundary(self, mu, which):
        if not 0.0 < abs(mu) < 1.0:
            raise DomainError(f"boundary value needs 0 < |mu| < 1, got {mu}")
        plus, minus = self.boundary_values(mu, which)
        name = LAMBDA0 if _which_index(which) == 0 else LAMBDA1
        return BoundaryValue(float(mu), complex(plus), complex(minus), name)

    def matrix_P_boundary(self, mu):
        """(P^+(mu), P^-(mu)) for mu in (0, 1), broadcast over mu."""
        mu = np.asarray(mu, dtype=float)
        if np.any((mu <= 0) | (mu >= 1)):
            raise DomainError("P boundary values need 0 < mu < 1")
        l0p, l0m = self.boundary_values(mu, LAMBDA0)
        l1p, l1m = self.boundary_values(mu, LAMBDA1)
        return self._P_from(mu, l0p, l1p), self._P_from(mu, l0m, l1m)

    # -- angle functions --------------------------------------------------

    def theta(self, u, which):
        """arg of the upper boundary value on [0, 1], continuous, in [0, pi].

        Endpoint limits are returned at u = 0 and u = 1.
        """
        u = np.asarray(u, dtype=float)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.arctan2(self.boundary_imag(u, which), self._pv(u, which))
        return out

    def theta_derivative(self, u, which):
        """d(theta_k)/du on (0, 1), from the quotient rule for atan2."""
        u = np.asarray(u, dtype=float)
        r0 = lambda0_pv(u)
        dr0 = -np.arctanh(u) - u / (1.0 - u * u)
        if _which_index(which) == 0:
            re, dre = r0, dr0
            im, dim = 0.5 * np.pi * u, 0.5 * np.pi
        else:
            g = self.g
            re = 1.0 + 3.0 * g * u * u * r0
            dre = 6.0 * g * u * r0 + 3.0 * g * u * u * dr0
            im, dim = 1.5 * np.pi * g * u**3, 4.5 * np.pi * g * u * u
        return (re * dim - im * dre) / (re * re + im * im)

    def angle_zeta(self, u, which):
        """zeta_k(u) = theta_k(u) - pi, with zeta(0+) = -pi and zeta(1-) = 0."""
        u = np.asarray(u, dtype=float)
        if np.any((u <= 0) | (u >= 1)):
            raise DomainError("angle functions are defined on (0, 1)")
        out = self.theta(u, which) - np.pi
        return out[()] if out.ndim == 0 else out

    def angle_table(self, which):
        k = _which_index(which)
        return self._tables[k]

    @cached_property
    def _tables(self):
        nodes, weights = angle_rule()
        return tuple(
            AngleTable(name, nodes, weights, self.theta(nodes, k) - np.pi)
            for k, name in enumerate((ZETA0, ZETA1))
        )

    # -- discrete spectrum ------------------------------------------------

    def _contour(self, epsilon, n_side):
        # Chebyshev spacing clusters points near the corners at the branch points.
        t = 0.5 * (1.0 - np.cos(np.linspace(0.0, np.pi, n_side, endpoint=False)))
        a = 1.0 + epsilon
        bottom = -a + 2.0 * a * t - 1j * epsilon
        right = a + 1j * epsilon * (-1.0 + 2.0 * t)
        top = a - 2.0 * a * t + 1j * epsilon
        left = -a + 1j * epsilon * (1.0 - 2.0 * t)
        return np.concatenate([bottom, right, top, left])

    def winding(self, which, epsilon, n_side):
        """Counter-clockwise winding of lambda_k around the rectangle at distance epsilon."""
        f = self.lambda0 if _which_index(which) == 0 else self.lambda1
        vals = f(self._contour(epsilon, n_side))
        steps = np.angle(np.roll(vals, -1) / vals)
        return steps.sum() / (2.0 * np.pi), np.abs(steps).max()

    def count_zeros(self, which, epsilon=1e-3, n_side=4000, max_doublings=10):
        """Number of finite zeros of lambda_k outside the cut, by the argument principle.

        The winding along the clockwise contour counts every zero of the
        exterior domain, including the one at infinity; its order is
        subtracted so the result counts finite zeros only.
        """
        if not epsilon > 0:
            raise DomainError("epsilon must be positive")
        name = LAMBDA0 if _which_index(which) == 0 else LAMBDA1
        previous = None
        for _ in range(max_doublings):
            w, max_step = self.winding(name, epsilon, n_side)
            count = int(round(-w))
            if max_step < 0.5 * np.pi and abs(-w - count) < 1e-6:
                if previous == count:
                    return count - _ORDER_AT_INFINITY[name]
                previous = count
            n_side *= 2
        raise NonConvergence(f"winding number of {name} did not stabilize")

    def find_eta0(self, bracket_hi=5.0, bracket_lo=1.0 + 1e-4):
        """Positive real zero of lambda1 outside the cut."""
        f = lambda x: float(self.lambda1(x).real)
        lo, hi = f(bracket_lo), f(bracket_hi)
        if not np.isfinite(lo) or not np.isfinite(hi) or lo * hi > 0:
            raise NoRoot(f"lambda1 has no sign change on [{bracket_lo}, {bracket_hi}]")
        root = brentq(f, bracket_lo, bracket_hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
        # brentq stops at xtol; finish on the exact floating-point bracket.
        best = min((root, np.nextafter(root, 0), np.nextafter(root, 2)), key=lambda x: abs(f(x)))
        return float(best)

    @cached_property
    def eta0(self):
        return self.find_eta0()


@lru_cache(maxsize=None)
def default_dispersion():
    """Dispersion with the computed coupling, shared across the package."""
    return Dispersion()


def lambda1(z, g=None):
    """lambda1 for coupling ``g`` (computed coupling by default)."""
    d = default_dispersion() if g is None else Dispersion(g=g)
    return d.lambda1(z)


def lambda_boundary(mu, which):
    return default_dispersion().lambda_boundary(mu, which)


def angle_zeta(u, which):
    return default_dispersion().angle_zeta(u, which)


def matrix_P(z):
    return default_dispersion().matrix_P(z)


def count_zeros(which, epsilon=1e-3):
    return default_dispersion().count_zeros(which, epsilon)


def find_eta0(bracket_hi=5.0, bracket_lo=1.0 + 1e-4):
    return default_dispersion().find_eta0(bracket_hi, bracket_lo)
