import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bosejump.dispersion import (
    LAMBDA0,
    LAMBDA1,
    ZETA0,
    ZETA1,
    Dispersion,
    default_dispersion,
    lambda0,
    lambda0_pv,
)
from bosejump.errors import DomainError, NoRoot, OnCut, SingularAtOrigin
from bosejump.quadrature import integrate

D = default_dispersion()


def lambda0_by_quadrature(z):
    return 1.0 + 0.5 * z * integrate(lambda u: 1.0 / (u - z), -1.0, 1.0)


def test_origin_limit():
    assert lambda0(0) == 1.0
    assert D.lambda1(0) == 1.0


def test_large_argument_series():
    assert lambda0(10.0).real == pytest.approx(-1 / 300 - 1 / 50000, rel=1e-3)
    assert abs(lambda0(10.0) - lambda0_by_quadrature(10.0)) < 1e-13


def test_series_and_closed_form_join_smoothly():
    z = np.array([3.99999999, 4.00000001, 4.0 + 1e-8j])
    vals = lambda0(z)
    assert np.abs(np.diff(vals)).max() < 1e-9


def test_closed_form_matches_quadrature_at_random_points():
    rng = np.random.default_rng(7)
    r = rng.uniform(1.01, 50.0, 100)
    phi = rng.uniform(0, 2 * np.pi, 100)
    z = r * np.exp(1j * phi)
    z = z[np.abs(z.imag) > 1e-3]
    closed = lambda0(z)
    quad = np.array([lambda0_by_quadrature(p) for p in z])
    assert np.abs(closed - quad).max() < 1e-10


@pytest.mark.parametrize("z", [0.5, -1.0, 1.0, -0.3])
def test_on_cut_rejected(z):
    with pytest.raises(OnCut):
        lambda0(z)
    with pytest.raises(OnCut):
        D.lambda1(z)


def test_real_outside_cut_is_real():
    for x in (1.5, -2.0, 7.0):
        assert abs(complex(lambda0(x)).imag) < 1e-15
        assert abs(complex(D.lambda1(x)).imag) < 1e-15


def test_lambda1_at_infinity():
    assert D.lambda1(1e7).real == pytest.approx(1.0 - D.g, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(r=st.floats(1.001, 100.0), phi=st.floats(0.01, 3.13))
def test_evenness(r, phi):
    z = r * complex(math.cos(phi), math.sin(phi))
    assert abs(lambda0(z) - lambda0(-z)) < 1e-13 * max(1.0, abs(lambda0(z)))
    assert abs(D.lambda1(z) - D.lambda1(-z)) < 1e-13


@settings(max_examples=50, deadline=None)
@given(mu=st.floats(-0.999, 0.999).filter(lambda m: abs(m) > 1e-6))
def test_sokhotski_jumps(mu):
    b0 = D.lambda_boundary(mu, LAMBDA0)
    b1 = D.lambda_boundary(mu, LAMBDA1)
    assert abs((b0.plus + b0.minus) / 2 - lambda0_pv(mu)) < 1e-10
    assert abs(b0.jump - 1j * math.pi * mu) < 1e-10
    assert abs(b1.jump - 3j * math.pi * D.g * mu**3) < 1e-10
    assert b1.plus == pytest.approx(b1.minus.conjugate(), abs=1e-15)


@pytest.mark.parametrize("mu", [0.1, 0.5, 0.9, -0.7])
@pytest.mark.parametrize("which", [LAMBDA0, LAMBDA1])
def test_boundary_values_are_limits_off_axis(mu, which):
    f = D.lambda0 if which == LAMBDA0 else D.lambda1
    b = D.lambda_boundary(mu, which)
    delta = 1e-9
    assert abs(f(mu + 1j * delta) - b.plus) < 1e-6
    assert abs(f(mu - 1j * delta) - b.minus) < 1e-6


def test_boundary_example_half():
    b = D.lambda_boundary(0.5, LAMBDA0)
    assert b.plus.real == pytest.approx(1 - 0.25 * math.log(3), abs=1e-15)
    assert b.plus.imag == pytest.approx(math.pi / 4, abs=1e-15)


@pytest.mark.parametrize("mu", [0.0, 1.0, -1.5])
def test_boundary_domain(mu):
    with pytest.raises(DomainError):
        D.lambda_boundary(mu, LAMBDA0)


def test_angle_endpoint_limits():
    assert D.angle_zeta(1e-9, ZETA0) == pytest.approx(-math.pi, abs=1e-8)
    assert D.angle_zeta(1e-9, ZETA1) == pytest.approx(-math.pi, abs=1e-8)
    # The approach to 0 at u -> 1 is only logarithmic.
    for which in (ZETA0, ZETA1):
        near = D.angle_zeta(np.array([1 - 1e-3, 1 - 1e-8, 1 - 1e-15]), which)
        assert np.all(np.diff(near) > 0) and -0.2 < near[-1] < 0


def test_angle_range_and_zero_crossing():
    u = np.linspace(1e-4, 1 - 1e-4, 2001)
    for which in (ZETA0, ZETA1):
        z = D.angle_zeta(u, which)
        assert np.all((z > -math.pi) & (z < 0))
    # lambda0 vanishes on the cut where mu artanh(mu) = 1
    from scipy.optimize import brentq

    root = brentq(lambda_pv_root := (lambda m: float(lambda0_pv(m))), 0.5, 0.99, xtol=1e-15)
    assert D.angle_zeta(root, ZETA0) == pytest.approx(-math.pi / 2, abs=1e-12)
    assert lambda_pv_root(root) == pytest.approx(0.0, abs=1e-13)


@pytest.mark.parametrize("u", [0.0, 1.0, 1.2])
def test_angle_domain(u):
    with pytest.raises(DomainError):
        D.angle_zeta(u, ZETA0)


def test_angle_matches_arctan_form_where_unambiguous():
    u = np.linspace(0.05, 0.95, 19)
    z1 = -math.pi / 2 - np.arctan(2 * D.lambda1_pv(u) / (3 * D.g * math.pi * u**3))
    assert np.allclose(D.angle_zeta(u, ZETA1), z1, atol=1e-13)
    z0 = -math.pi / 2 - np.arctan(2 * lambda0_pv(u) / (math.pi * u))
    assert np.allclose(D.angle_zeta(u, ZETA0), z0, atol=1e-13)


def test_theta_derivative_matches_difference_quotient():
    u = np.array([0.01, 0.3, 0.7, 0.99])
    h = 1e-6
    for k in (0, 1):
        numeric = (D.theta(u + h, k) - D.theta(u - h, k)) / (2 * h)
        assert np.allclose(D.theta_derivative(u, k), numeric, rtol=1e-6)


def test_angle_table_is_cached_and_sorted():
    t = D.angle_table(ZETA1)
    assert t is D.angle_table(1)
    assert np.all(np.diff(t.nodes) > 0)
    assert 0 < t.nodes[0] and t.nodes[-1] < 1
    assert t.weights.sum() == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("eps", [1e-3, 1e-4, 1e-5])
def test_zero_counts(eps):
    assert D.count_zeros(LAMBDA1, eps) == 2
    assert D.count_zeros(LAMBDA0, eps) == 0


def test_margin_wider_than_eta0_gap_swallows_zeros():
    # eta0 - 1 < 1e-2, so the rectangle at that margin already encloses +-eta0.
    assert D.eta0 - 1 < 1e-2
    assert D.count_zeros(LAMBDA1, 1e-2) == 0


def test_count_zeros_rejects_bad_margin():
    with pytest.raises(DomainError):
        D.count_zeros(LAMBDA1, 0.0)


def test_eta0_properties():
    eta0 = D.find_eta0()
    assert eta0 > 1
    assert abs(D.lambda1(eta0)) < 1e-12
    assert abs(D.lambda1(-eta0)) < 1e-12
    assert abs(lambda0(eta0) + 1 / (3 * D.g * eta0**2)) < 1e-10


def test_eta0_no_root():
    with pytest.raises(NoRoot):
        D.find_eta0(bracket_hi=1.002)


def test_eta0_for_other_couplings():
    # A stronger coupling pushes eta0 away from the cut.
    d = Dispersion(g=0.5914, ratio=D.ratio)
    assert d.find_eta0() == pytest.approx(1.2757, abs=1e-3)


def test_matrix_P():
    z = np.array([2.0 + 0.3j, -1.5 + 2j, 10.0])
    p = D.matrix_P(z)
    assert np.all(p[:, 0, 1] == 0)
    det = np.linalg.det(p)
    assert np.allclose(det, D.dispersion_function(z) / (3 * D.g * z**2), atol=1e-14)
    big = 1e6
    assert (D.matrix_P(big)[0, 0] * 3 * D.g * big**2).real == pytest.approx(1 - D.g, abs=1e-9)
    with pytest.raises(SingularAtOrigin):
        D.matrix_P(0.0)


@settings(max_examples=30, deadline=None)
@given(r=st.floats(1.01, 20.0), phi=st.floats(-3.1, 3.1))
def test_dispersion_matrix_decomposition(r, phi):
    z = r * complex(math.cos(phi), math.sin(phi))
    lam = D.dispersion_matrix(z)
    expected = D.lambda0(z) * D.D(z * z) + D.D0
    assert np.abs(lam - expected).max() < 1e-12
    assert lam[0, 1] == 0
    assert abs(lam[0, 0] - D.lambda1(z)) < 1e-12


def test_diagonalizer():
    from bosejump.factorization import default_factorization

    s = default_factorization().diagonalizer()
    for z in (2.0, 1.5 + 0.5j, -3j):
        m = np.linalg.inv(s) @ D.matrix_P(z) @ s
        assert abs(m[0, 1]) < 1e-14 and abs(m[1, 0]) < 1e-14


def test_evaluate_bundle():
    v = D.evaluate(2.0)
    assert v.z == 2.0
    assert v.lambda1 == pytest.approx(complex(D.lambda1(2.0)))
