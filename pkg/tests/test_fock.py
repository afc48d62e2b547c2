import numpy as np
import pytest
from numpy.testing import assert_allclose

from dopo import fock
from dopo.errors import DimensionError

from conftest import random_density_matrix


def test_ladder_commutator_truncated():
    a = fock.annihilation(6)
    c = a @ a.T - a.T @ a
    assert_allclose(np.diag(c)[:-1], 1.0)
    assert_allclose(c[-1, -1], -5.0)


def test_number_operator():
    assert_allclose(np.diag(fock.number(5)), np.arange(5))


def test_bad_dimension():
    with pytest.raises(DimensionError):
        fock.annihilation(0)


def test_partial_trace_of_product(rng):
    rp = random_density_matrix(rng, 3)
    rs = random_density_matrix(rng, 4)
    joint = np.kron(rp, rs)
    assert_allclose(fock.partial_trace(joint, (3, 4), fock.PUMP), rp, atol=1e-14)
    assert_allclose(fock.partial_trace(joint, (3, 4), fock.SIGNAL), rs, atol=1e-14)


def test_coherent_state_moments():
    alpha = 1.2 - 0.4j
    rho = fock.coherent_dm(40, alpha)
    a = fock.annihilation(40)
    assert_allclose(fock.expect(a, rho), alpha, atol=1e-12)
    assert_allclose(fock.expect(a.T @ a, rho).real, abs(alpha) ** 2, atol=1e-12)


def test_thermal_state():
    rho = fock.thermal_dm(80, 1.5)
    assert_allclose(fock.expect(fock.number(80), rho).real, 1.5, rtol=1e-8)


def test_gaussian_dm_moments():
    n, m = 0.6, 0.5 + 0.2j
    rho = fock.gaussian_dm(60, alpha=0.3, n=n, m=m)
    a = fock.annihilation(60)
    al = fock.expect(a, rho)
    assert_allclose(al, 0.3, atol=1e-10)
    assert_allclose(fock.expect(a.T @ a, rho).real - abs(al) ** 2, n, atol=1e-10)
    assert_allclose(fock.expect(a @ a, rho) - al ** 2, m, atol=1e-10)
    assert np.linalg.eigvalsh(rho)[0] > -1e-12


def test_trace_distance_and_fidelity(rng):
    r = random_density_matrix(rng, 5)
    assert_allclose(fock.trace_distance(r, r), 0.0, atol=1e-12)
    assert_allclose(fock.fidelity(r, r), 1.0, atol=1e-8)
    assert_allclose(fock.trace_distance(fock.fock_dm(3, 0), fock.fock_dm(3, 1)), 1.0)
