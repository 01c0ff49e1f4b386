import numpy as np
import pytest

from bosejump.errors import DomainError, GridMismatch
from bosejump.jump_solver import SolutionCoefficients
from bosejump.oracle import collision_source, compare_with_analytic, half_range_gauss, solve_halfspace


def test_zero_amplitude():
    sol = solve_halfspace(0.0, n_mu=16, n_x=100, L=20.0)
    assert np.all(sol.grid.h == 0) and sol.eps_T_estimate == 0.0
    assert sol.flux_variation == 0.0


def test_angular_grid():
    mu, w = half_range_gauss(32)
    assert w.sum() == pytest.approx(2.0, abs=1e-14)
    assert np.all(mu != 0) and np.all(np.abs(mu) < 1)
    assert np.allclose(mu, -mu[::-1])


def test_collision_null_vectors():
    n_mu = 24
    mu, _ = half_range_gauss(n_mu)
    for h in (np.stack([mu, 0 * mu], -1), np.stack([0 * mu, 1 + 0 * mu], -1)):
        assert np.abs(collision_source(h, n_mu) - h).max() < 1e-13


def test_far_field_is_a_fixed_point():
    n_mu = 24
    mu, _ = half_range_gauss(n_mu)
    h = np.stack([2.0 * mu, np.full(mu.shape, -0.4)], -1)
    assert np.abs(collision_source(h, n_mu) - h).max() < 1e-13


def test_flux_profile_constant(oracle_default):
    assert oracle_default.flux_variation < 1e-4
    assert oracle_default.grid.h.shape == (601, 128, 2)


def test_wall_inflow_is_zero(oracle_default):
    h0 = oracle_default.grid.h[0]
    assert np.all(h0[oracle_default.grid.mu_nodes > 0] == 0)


def test_slab_depth_insensitive():
    eps = [solve_halfspace(1.0, L=L, n_mu=32, n_x=int(20 * L)).eps_T_estimate for L in (20.0, 30.0, 40.0)]
    assert (max(eps) - min(eps)) / abs(np.mean(eps)) < 2e-3


def test_refinement_reduces_error(solver, unit_coeffs, oracle_default, oracle_refined):
    coarse = compare_with_analytic(oracle_default, unit_coeffs, solver)
    fine = compare_with_analytic(oracle_refined, unit_coeffs, solver)
    assert fine.eps_relative_error < coarse.eps_relative_error < 1e-2
    assert fine.max_discrepancy < coarse.max_discrepancy
    assert fine.l2_discrepancy < coarse.l2_discrepancy


def test_oracle_linear_in_B(oracle_default):
    sol = solve_halfspace(-2.5, L=30.0, n_mu=64, n_x=600)
    assert sol.eps_T_estimate == pytest.approx(-2.5 * oracle_default.eps_T_estimate, rel=1e-8)


def test_mismatched_amplitude(oracle_default):
    with pytest.raises(GridMismatch):
        compare_with_analytic(oracle_default, SolutionCoefficients(2.0, 2.0, 0, 0, 0, 0))


@pytest.mark.parametrize("kwargs", [dict(L=10.0), dict(n_mu=8), dict(n_x=0), dict(tol=0.0)])
def test_parameter_domain(kwargs):
    with pytest.raises(DomainError):
        solve_halfspace(1.0, **kwargs)
