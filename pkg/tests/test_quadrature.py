import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bosejump.errors import DomainError, NonConvergence, PoleOnBoundary
from bosejump.quadrature import (
    QuadratureSpec,
    adaptive,
    gauss_legendre_rule,
    integrate,
    integrate_pv,
    integrate_semi_infinite,
)


def test_constant_and_polynomial():
    assert integrate(lambda u: np.ones_like(u), 0.0, 1.0) == pytest.approx(1.0, abs=1e-15)
    assert integrate(lambda u: u * u, -1.0, 1.0) == pytest.approx(2.0 / 3.0, abs=1e-15)


def test_scalar_only_integrand_is_accepted():
    assert integrate(lambda u: math.sin(u), 0.0, math.pi) == pytest.approx(2.0, abs=1e-13)


def test_complex_integrand():
    val = integrate(lambda u: np.exp(1j * u), 0.0, math.pi)
    assert val == pytest.approx(2j, abs=1e-13)


def test_log_endpoint_singularity():
    # integral of ln(u) on (0, 1) is -1
    assert integrate(np.log, 0.0, 1.0) == pytest.approx(-1.0, abs=1e-11)


def test_semi_infinite_gaussian():
    val = integrate_semi_infinite(lambda c: np.exp(-c * c), 0.0)
    assert val == pytest.approx(math.sqrt(math.pi) / 2, abs=1e-13)


def test_bose_moment_through_semi_infinite():
    f = lambda c: c**5 * np.exp(-c * c) / np.expm1(-c * c) ** 2
    assert integrate_semi_infinite(f, 0.0, cutoff=7.0) == pytest.approx(math.pi**2 / 6, abs=1e-11)


def test_error_estimate_and_panels():
    value, err, panels = adaptive(np.cos, 0.0, 10.0)
    assert value == pytest.approx(math.sin(10.0), abs=1e-13)
    assert err < 1e-12
    assert panels >= 1


def test_nonconvergence_when_budget_exhausted():
    spec = QuadratureSpec(abs_tol=1e-14, rel_tol=1e-14, max_subdivisions=2)
    with pytest.raises(NonConvergence):
        integrate(lambda u: np.sin(200.0 * u), 0.0, 10.0, spec)


@pytest.mark.parametrize("kwargs", [dict(abs_tol=0.0), dict(rel_tol=-1.0), dict(max_subdivisions=0)])
def test_spec_validation(kwargs):
    with pytest.raises(DomainError):
        QuadratureSpec(**kwargs)


def test_reversed_interval_rejected():
    with pytest.raises(DomainError):
        integrate(np.cos, 1.0, 0.0)


def test_gauss_legendre_rule_sums():
    nodes, weights = gauss_legendre_rule([0.0, 0.25, 1.0])
    assert weights.sum() == pytest.approx(1.0, abs=1e-15)
    assert weights @ nodes**7 == pytest.approx(1.0 / 8.0, abs=1e-15)
    with pytest.raises(DomainError):
        gauss_legendre_rule([0.0, 0.0, 1.0])


@pytest.mark.parametrize(
    "f, a, b, pole, expected",
    [
        (lambda u: np.ones_like(u), -1.0, 1.0, 0.0, 0.0),
        (lambda u: np.ones_like(u), -1.0, 1.0, 0.5, math.log(0.5 / 1.5)),
        (lambda u: u, 0.0, 1.0, 0.3, 1.0 + 0.3 * math.log(0.7 / 0.3)),
    ],
)
def test_principal_value_closed_forms(f, a, b, pole, expected):
    assert integrate_pv(f, a, b, pole) == pytest.approx(expected, abs=1e-13)


@pytest.mark.parametrize("pole", [-1.0, 1.0, 2.0])
def test_pole_must_be_interior(pole):
    with pytest.raises(PoleOnBoundary):
        integrate_pv(np.cos, -1.0, 1.0, pole)


def _truncated(f, a, b, pole, eps):
    g = lambda u: f(u) / (u - pole)
    return integrate(g, a, pole - eps) + integrate(g, pole + eps, b)


@pytest.mark.parametrize("pole", [0.2, 0.5, 0.77])
def test_pv_matches_extrapolated_limit(pole):
    f = lambda u: np.exp(u) * np.cos(3 * u)
    pv = integrate_pv(f, 0.0, 1.0, pole)
    # The symmetric excision error is linear in eps; Richardson removes it.
    vals = [_truncated(f, 0.0, 1.0, pole, eps) for eps in (1e-3, 1e-4, 1e-5)]
    limits = [(10 * fine - coarse) / 9 for coarse, fine in zip(vals, vals[1:])]
    assert all(abs(lim - pv) < 1e-8 for lim in limits)


@settings(max_examples=25, deadline=None)
@given(
    alpha=st.floats(-5, 5),
    beta=st.floats(-5, 5),
    a=st.floats(-2, 0),
    width=st.floats(0.1, 3),
)
def test_linearity(alpha, beta, a, width):
    b = a + width
    f, g = np.sin, lambda u: u**3 - np.exp(u)
    combined = integrate(lambda u: alpha * f(u) + beta * g(u), a, b)
    separate = alpha * integrate(f, a, b) + beta * integrate(g, a, b)
    assert abs(combined - separate) <= 10 * 1e-12 * max(1.0, abs(combined))


@pytest.mark.parametrize("f, a, b, exact", [(np.sqrt, 0.0, 1.0, 2 / 3), (np.log1p, 0.0, 1.0, 2 * math.log(2) - 1)])
def test_tighter_tolerance_does_not_hurt(f, a, b, exact):
    errors = []
    for tol in (1e-6, 5e-7, 2.5e-7, 1e-8):
        spec = QuadratureSpec(abs_tol=tol, rel_tol=1e-15)
        errors.append(abs(integrate(f, a, b, spec) - exact))
    assert all(later <= earlier + 1e-15 for earlier, later in zip(errors, errors[1:]))
