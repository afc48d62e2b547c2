import numpy as np
import pytest
from numpy.testing import assert_allclose

from dopo import fock
from dopo.liouville import EvolveConfig, build_liouvillian, steady_state
from dopo.meanfield import (ABOVE_PLUS, BELOW, classical_fixed_points, classical_rhs,
                            meanfield_dynamics, meanfield_rhs, meanfield_steady,
                            quadratic_signal_moments, vacuum_state)
from dopo.params import DopoParams


@pytest.mark.parametrize("sigma", [0.3, 1.0, 2.5])
def test_classical_points_are_stationary(sigma):
    p = DopoParams.from_sigma(sigma, chi=0.2, gamma_p=0.5)
    for pt in classical_fixed_points(p):
        assert_allclose(classical_rhs(p, pt.alpha_p, pt.alpha_s), 0.0, atol=1e-12)


def test_threshold_exchange_of_stability():
    below = classical_fixed_points(DopoParams.from_sigma(0.9, chi=0.1))
    assert [c.branch for c in below] == [BELOW] and below[0].stable
    above = {c.branch: c for c in classical_fixed_points(DopoParams.from_sigma(1.5, chi=0.1))}
    assert not above[BELOW].stable and above[ABOVE_PLUS].stable
    assert_allclose(0.1 * above[ABOVE_PLUS].alpha_p, 1.0)


def test_quadratic_moments_match_lindblad():
    """Steady Gaussian of the damped parametric amplifier against a Fock-space solve."""
    mu, g, dim = 0.4, 1.0, 40
    a = fock.annihilation(dim).astype(complex)
    L = build_liouvillian([(0.5 * mu, a.T @ a.T - a @ a)], [(g, a)])
    rho = steady_state(L, check_unique=False)
    n, m = quadratic_signal_moments(mu, g)
    assert_allclose(fock.expect(a.T @ a, rho).real, n, rtol=1e-8)
    assert_allclose(fock.expect(a @ a, rho), m, rtol=1e-8)


@pytest.mark.parametrize("sigma", [0.0, 0.5, 1.0, 2.0, 5.0])
def test_meanfield_steady_is_stationary(sigma):
    p = DopoParams.from_sigma(sigma, chi=0.3)
    s = meanfield_steady(p)
    assert_allclose(meanfield_rhs(p, s.alpha_p, s.n_s, s.m_s), 0.0, atol=1e-10)
    assert s.is_physical()
    assert 0.3 * s.alpha_p.real < p.gamma_s


def test_meanfield_dynamics_relaxes():
    p = DopoParams.from_sigma(0.7, chi=0.5)
    s = meanfield_steady(p)
    traj = meanfield_dynamics(p, vacuum_state(), [0, 60], EvolveConfig(rtol=1e-10, atol=1e-12))
    assert_allclose(traj[-1].n_s, s.n_s, rtol=1e-6)
    assert_allclose(traj[-1].alpha_p, s.alpha_p, rtol=1e-8)
