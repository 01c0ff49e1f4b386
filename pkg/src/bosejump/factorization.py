"""Factorization of the homogeneous boundary problem on the cut [0, 1].

For k = 0, 1 the Cauchy integrals

    V_k(z) = (1/pi) * integral_0^1 zeta_k(u) du / (u - z)

give the scalar factors ``U_k(z) = z * exp(-V_k(z))``, which are analytic
and zero-free off [0, 1] and grow like ``z - V_k^(-1)`` at infinity.  The
lower-triangular matrix

    X(z) = [[U1, 0], [r (U0 - U1), U0]],  r = g1/g2,

satisfies ``P^+ X^+ = P^- X^-`` on (0, 1).

Since ``zeta_k = theta_k - pi`` the same factor can be written
``U_k(z) = (z - 1) exp(-W_k(z))`` with ``W_k`` the Cauchy integral of
``theta_k``.  ``theta_k(0) = 0``, so this form is regular at the origin and
is used for Re z < 1/2, while the ``V_k`` form (regular at z = 1, where
``zeta_k(1) = 0``) is used elsewhere.
"""

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .dispersion import default_dispersion
from .errors import DomainError, OnCut
from .quadrature import DEFAULT_SPEC, integrate, integrate_pv

# Points closer than this to [0, 1] are integrated adaptively instead of
# with the fixed table rule.
NEAR_CUT = 0.05
# Table nodes closer than this to a principal-value pole use the derivative.
_COINCIDENT = 1e-9
_CHUNK = 256


def _dist_to_segment(z):
    x = np.clip(z.real, 0.0, 1.0)
    return np.abs(z - x)


def _check_off_cut(z):
    z = np.asarray(z, dtype=complex)
    on = (z.imag == 0) & (z.real >= 0.0) & (z.real <= 1.0)
    if np.any(on):
        raise OnCut(f"z={z[on].ravel()[0]} lies on [0, 1]; use the boundary variant")
    return z


def _check_open_unit(tau):
    tau = np.asarray(tau, dtype=float)
    if np.any((tau <= 0.0) | (tau >= 1.0)):
        raise DomainError("boundary values are defined for 0 < tau < 1")
    return tau


def _scalar(a):
    return a[()] if a.ndim == 0 else a


@dataclass(frozen=True)
class BoundaryPair:
    tau: float
    plus: complex
    minus: complex

    @property
    def jump(self):
        return self.plus - self.minus


class Factorization:
    """V_k, U_k and X evaluators sharing the angle tables of one dispersion."""

    def __init__(self, dispersion=None):
        self.dispersion = dispersion or default_dispersion()
        self.ratio = self.dispersion.ratio
        self._tables = (self.dispersion.angle_table(0), self.dispersion.angle_table(1))

    # -- densities --------------------------------------------------------

    def _density(self, k, u, shift):
        """theta_k(u) - shift on the closed interval [0, 1]."""
        return self.dispersion.theta(u, k) - shift

    def _table(self, k, shift):
        t = self._tables[k]
        return t.nodes, t.weights, t.theta - shift

    # -- moments ----------------------------------------------------------

    def moment_Vm1(self, k):
        """V_k^(-1) = -(1/pi) * integral_0^1 zeta_k(u) du."""
        _, w, zeta = self._table(k, np.pi)
        return float(-(w @ zeta) / np.pi)

    @cached_property
    def v0_m1(self):
        return self.moment_Vm1(0)

    @cached_property
    def v1_m1(self):
        return self.moment_Vm1(1)

    # -- Cauchy integrals off the cut ----------------------------------------

    def _cauchy(self, k, z, shift):
        """(1/pi) * integral_0^1 (theta_k(u) - shift)/(u - z) du for z off [0, 1].

        The density value at the nearest point of [0, 1] is subtracted and
        its integral restored in closed form.
        """
        z = _check_off_cut(z)
        flat = z.ravel()
        x0 = np.clip(flat.real, 0.0, 1.0)
        f0 = self._density(k, x0, shift)
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = np.where(f0 != 0.0, np.log(1.0 - flat) - np.log(-flat), 0.0)
        u, w, vals = self._table(k, shift)
        smooth = np.empty(flat.shape, dtype=complex)
        for s in range(0, flat.size, _CHUNK):
            zz = flat[s : s + _CHUNK, None]
            smooth[s : s + _CHUNK] = ((vals - f0[s : s + _CHUNK, None]) / (u - zz)) @ w
        for i in np.flatnonzero(_dist_to_segment(flat) < NEAR_CUT):
            smooth[i] = self._near_integral(k, flat[i], x0[i], f0[i], shift)
        out = (smooth + f0 * logs) / np.pi
        return out.reshape(z.shape)

    def _near_integral(self, k, z, x0, f0, shift):
        def integrand(u):
            return (self._density(k, u, shift) - f0) / (u - z)

        pieces = [p for p in ((0.0, x0), (x0, 1.0)) if p[1] > p[0]]
        return sum(integrate(integrand, a, b) for a, b in pieces)

    def cauchy_V(self, k, z):
        """V_k(z) = (1/pi) * integral_0^1 zeta_k(u)/(u - z) du."""
        return _scalar(self._cauchy(k, z, np.pi))

    def cauchy_W(self, k, z):
        """W_k(z) = (1/pi) * integral_0^1 theta_k(u)/(u - z) du."""
        return _scalar(self._cauchy(k, z, 0.0))

    # -- boundary values on the cut -----------------------------------------

    def pv_V(self, k, tau):
        """Principal value of V_k on (0, 1), vectorized over the table rule."""
        tau = _check_open_unit(tau)
        flat = tau.ravel()
        u, w, vals = self._table(k, np.pi)
        f0 = self._density(k, flat, np.pi)
        slope = self.dispersion.theta_derivative(flat, k)
        out = np.empty(flat.shape)
        for s in range(0, flat.size, _CHUNK):
            t = flat[s : s + _CHUNK, None]
            d = u - t
            close = np.abs(d) < _COINCIDENT
            q = (vals - f0[s : s + _CHUNK, None]) / np.where(close, 1.0, d)
            q = np.where(close, slope[s : s + _CHUNK, None], q)
            out[s : s + _CHUNK] = q @ w
        out = (out + f0 * np.log((1.0 - flat) / flat)) / np.pi
        return _scalar(out.reshape(tau.shape))

    def cauchy_V_boundary(self, k, tau, spec=None):
        """(V_k^+, V_k^-) at tau in (0, 1) with the principal value from adaptive quadrature."""
        tau = float(_check_open_unit(tau))
        pv = integrate_pv(lambda u: self._density(k, u, np.pi), 0.0, 1.0, tau, spec or DEFAULT_SPEC) / np.pi
        zeta = float(self._density(k, tau, np.pi))
        return BoundaryPair(tau, complex(pv, zeta), complex(pv, -zeta))

    # -- factor functions ---------------------------------------------------

    def factor_U(self, k, z):
        """U_k(z) = z exp(-V_k(z)) for z off [0, 1]."""
        z = _check_off_cut(z)
        left = z.real < 0.5
        out = np.empty(z.shape, dtype=complex)
        if np.any(left):
            out[left] = (z[left] - 1.0) * np.exp(-self._cauchy(k, z[left], 0.0))
        if np.any(~left):
            out[~left] = z[~left] * np.exp(-self._cauchy(k, z[~left], np.pi))
        return _scalar(out)

    def factor_U_origin(self, k):
        """lim U_k(z) as z -> 0 off the cut, equal to -exp(-W_k(0)).

        ``W_k(0) = (1/pi) * integral_0^1 theta_k(u)/u du`` converges because
        theta_k vanishes at the origin.
        """
        u, w, theta = self._table(k, 0.0)
        return float(-np.exp(-(w @ (theta / u)) / np.pi))

    def factor_U_boundary(self, k, tau):
        """(U_k^+, U_k^-) = tau exp(-PV) exp(-/+ i zeta_k) on (0, 1).

        Written with theta_k = zeta_k + pi, which keeps full relative
        precision where theta_k is tiny (small tau).
        """
        tau = _check_open_unit(tau)
        mod = -tau * np.exp(-self.pv_V(k, tau))
        theta = self._density(k, tau, 0.0)
        return _scalar(mod * np.exp(-1j * theta)), _scalar(mod * np.exp(1j * theta))

    def U_jump(self, k, tau):
        """U_k^+ - U_k^- = -2 i tau exp(-PV) sin(zeta_k) = 2 i tau exp(-PV) sin(theta_k)."""
        tau = _check_open_unit(tau)
        theta = self._density(k, tau, 0.0)
        return _scalar(2j * tau * np.exp(-self.pv_V(k, tau)) * np.sin(theta))

    # -- matrices -----------------------------------------------------------

    def _assemble(self, u0, u1):
        u0 = np.asarray(u0)
        out = np.zeros(u0.shape + (2, 2), dtype=complex)
        out[..., 0, 0] = u1
        out[..., 1, 0] = self.ratio * (u0 - u1)
        out[..., 1, 1] = u0
        return out

    def matrix_X(self, z):
        return self._assemble(self.factor_U(0, z), self.factor_U(1, z))

    def matrix_X_inv(self, z):
        u0, u1 = np.asarray(self.factor_U(0, z)), np.asarray(self.factor_U(1, z))
        return self._assemble(1.0 / u0, 1.0 / u1)

    def matrix_X_boundary(self, tau):
        (u0p, u0m), (u1p, u1m) = self.factor_U_boundary(0, tau), self.factor_U_boundary(1, tau)
        return self._assemble(u0p, u1p), self._assemble(u0m, u1m)

    def rh_residual(self, mu):
        """max-norm of P^+ X^+ - P^- X^- at each mu in (0, 1)."""
        mu = _check_open_unit(mu)
        pp, pm = self.dispersion.matrix_P_boundary(mu)
        xp, xm = self.matrix_X_boundary(mu)
        diff = pp @ xp - pm @ xm
        return _scalar(np.abs(diff).max(axis=(-2, -1)))

    # -- integral representation of U1 ------------------------------------

    def jump_integral(self, k, z):
        """J_k(z) = (1/(2 pi i)) * integral_0^1 (U_k^+ - U_k^-)(tau)/(tau - z) dtau."""
        z = complex(z)
        if z.imag == 0 and 0.0 <= z.real <= 1.0 and z != 0:
            raise OnCut(f"z={z} lies on [0, 1]")

        def density(tau):
            return (self.U_jump(k, tau) / (2j * np.pi)).real / (tau - z)

        breaks = [0.0, 1.0]
        if _dist_to_segment(np.array([z]))[0] < NEAR_CUT and 0.0 < z.real < 1.0:
            breaks = [0.0, z.real, 1.0]
        return sum(
            integrate(lambda t: density(np.clip(t, 1e-300, 1.0 - 1e-16)), a, b)
            for a, b in zip(breaks[:-1], breaks[1:])
        )

    def check_U1_representation(self, z):
        """|U1(z) - z + V1^(-1) - J_1(z)|; z = 0 uses the limit U1(0)."""
        z = complex(z)
        u1 = self.factor_U_origin(1) if z == 0 else complex(self.factor_U(1, z))
        return float(abs(u1 - z + self.v1_m1 - self.jump_integral(1, z)))

    def diagonalizer(self):
        """Constant S with S^-1 P(z) S diagonal for every z."""
        return np.array([[1.0, 0.0], [-self.ratio, 1.0]])


@lru_cache(maxsize=None)
def default_factorization():
    """Factorization for the computed coupling, shared across the package."""
    return Factorization()
