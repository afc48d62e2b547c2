import numpy as np
import pytest
from numpy.testing import assert_allclose

from dopo import fock
from dopo.errors import UndefinedG2Error
from dopo.observables import (GaussianMixture, GaussianMoments, WignerGrid, g2, moments_from_rho,
                              photon_number, quadrature_variances, wigner_displaced_parity,
                              wigner_from_gaussian, wigner_from_rho)


def test_g2_reference_states():
    assert_allclose(g2(fock.coherent_dm(50, 1.5)), 1.0, atol=1e-8)
    assert_allclose(g2(fock.thermal_dm(120, 1.0)), 2.0, rtol=1e-6)
    assert_allclose(g2(fock.fock_dm(5, 2)), 0.5)
    with pytest.raises(UndefinedG2Error):
        g2(fock.fock_dm(4, 0))


def test_gaussian_g2_matches_density_matrix():
    st = GaussianMoments(0.4 + 0.1j, 0.3, 0.2 - 0.1j)
    rho = fock.gaussian_dm(60, st.alpha, st.n, st.m)
    assert_allclose(st.g2, g2(rho), rtol=1e-9)
    assert_allclose(st.photon_number, photon_number(rho), rtol=1e-9)


def test_squeezed_vacuum_g2():
    r = 0.5
    st = GaussianMoments(0j, np.sinh(r) ** 2, -np.sinh(r) * np.cosh(r))
    assert_allclose(st.g2, 3 + 1 / np.sinh(r) ** 2)


def test_vacuum_quadratures():
    vx, vp = quadrature_variances(GaussianMoments())
    assert_allclose((vx, vp), (1.0, 1.0))
    assert_allclose(quadrature_variances(fock.fock_dm(5, 0)), (1.0, 1.0))


def test_mixture_variance():
    plus = GaussianMoments(1.0, 0.0, 0j)
    mix = GaussianMixture((plus, GaussianMoments(-1.0, 0.0, 0j)))
    vx, vp = quadrature_variances(mix)
    assert_allclose(vx, 1 + 4.0)
    assert_allclose(vp, 1.0)
    assert_allclose(mix.photon_number, 1.0)


def test_wigner_laguerre_matches_displaced_parity(rng):
    X = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = X @ X.conj().T
    rho /= np.trace(rho)
    x = np.linspace(-2, 2, 5)
    fast = wigner_from_rho(rho, x, x, warn_tol=1.0)
    slow = wigner_displaced_parity(rho, x, x)
    assert_allclose(fast.values, slow.values, atol=1e-10)


def test_wigner_vacuum_convention():
    x = np.linspace(-6, 6, 241)
    w = wigner_from_rho(fock.fock_dm(3, 0), x, x)
    assert_allclose(w.values[120, 120], 1 / (2 * np.pi), rtol=1e-12)
    assert_allclose(w.normalization(), 1.0, atol=1e-8)
    assert_allclose(w.moment(lambda X, P: X ** 2), 1.0, atol=1e-6)


def test_wigner_gaussian_matches_fock():
    st = GaussianMoments(0.5, 0.2, 0.15)
    x = np.linspace(-5, 5, 41)
    w1 = wigner_from_gaussian(st, x, x)
    w2 = wigner_from_rho(fock.gaussian_dm(50, st.alpha, st.n, st.m), x, x)
    assert_allclose(w1.values, w2.values, atol=1e-9)


def test_wigner_file_round_trip(tmp_path):
    x = np.linspace(-3, 3, 7)
    w = wigner_from_gaussian(GaussianMoments(0.2, 0.1, 0.05), x, x)
    w.to_binary(tmp_path / "w.bin")
    back = WignerGrid.from_binary(tmp_path / "w.bin")
    assert_allclose(back.values, w.values)
    assert_allclose(back.x, w.x)
    w.to_csv(tmp_path / "w.csv")
    data = np.loadtxt(tmp_path / "w.csv", delimiter=",")
    assert_allclose(data[:, 2].reshape(7, 7), w.values, rtol=1e-11)


def test_two_peaks_for_cat_mixture():
    mix = GaussianMixture((GaussianMoments(2.0, 0, 0j), GaussianMoments(-2.0, 0, 0j)))
    x = np.linspace(-7, 7, 141)
    w = wigner_from_gaussian(mix, x, x)
    assert len(w.local_maxima()) == 2
    assert w.point_asymmetry() < 1e-14


def test_moments_from_rho():
    rho = fock.coherent_dm(40, 0.7j)
    m = moments_from_rho(rho)
    assert_allclose(m.alpha, 0.7j, atol=1e-12)
    assert_allclose(m.n, 0.0, atol=1e-12)


def test_wigner_large_dimension_coherent_state():
    """Large truncations: the series must stay accurate far from the origin."""
    alpha = 8.0
    x = np.linspace(-26, 26, 27)
    w = wigner_from_rho(fock.coherent_dm(200, alpha), x, x)
    ref = wigner_from_gaussian(GaussianMoments(alpha, 0, 0j), x, x)
    assert_allclose(w.values, ref.values, atol=1e-10)
