import numpy as np
import pytest
import scipy.linalg as la
from numpy.testing import assert_allclose

from dopo.cmop import correlation_decomposition, correlation_matrix
from dopo.errors import IllPosedFrameError
from dopo.params import DopoParams


def random_frames(rng, count):
    """Admissible frames: ``chi |alpha_tilde| < gamma_s``."""
    for _ in range(count):
        gs = rng.uniform(0.2, 3.0)
        chi = rng.uniform(0.01, 2.0)
        r = rng.uniform(0, 0.98) * gs / chi
        yield DopoParams(gamma_s=gs, gamma_p=1.0, chi=chi), r * np.exp(1j * rng.uniform(0, 2 * np.pi))


def test_projectors_reconstruct_exponential(rng):
    for p, at in random_frames(rng, 50):
        dec = correlation_decomposition(at, p)
        for tau in (0.0, 0.3, 2.0):
            assert_allclose(dec.propagator(tau), la.expm(dec.matrix * tau), atol=1e-10)


def test_projectors_are_complete_and_orthogonal(rng):
    for p, at in random_frames(rng, 10):
        P = correlation_decomposition(at, p).projectors
        assert_allclose(P.sum(axis=0), np.eye(3), atol=1e-12)
        assert_allclose(P[0] @ P[1], 0, atol=1e-12)
        assert_allclose(P[2] @ P[2], P[2], atol=1e-12)


def test_eigenvalues():
    p = DopoParams(gamma_s=1.0, gamma_p=1.0, chi=0.5)
    dec = correlation_decomposition(0.8, p)
    assert_allclose(np.sort(dec.lambdas.real), [-2.8, -2.0, -1.2])
    assert_allclose(np.sort(np.linalg.eigvals(correlation_matrix(0.8, 1.0, 0.5)).real),
                    [-2.8, -2.0, -1.2], atol=1e-12)


def test_third_component(rng):
    p = DopoParams(gamma_s=1.0, gamma_p=1.0, chi=0.5)
    dec = correlation_decomposition(0.3 + 0.4j, p)
    u = rng.normal(size=3) + 1j * rng.normal(size=3)
    d = dec.coefficients(u)
    tau = 0.7
    assert_allclose(np.sum(d * np.exp(dec.lambdas * tau)), (la.expm(dec.matrix * tau) @ u)[2],
                    atol=1e-12)


def test_ill_posed_frame():
    p = DopoParams(gamma_s=1.0, gamma_p=1.0, chi=0.5)
    with pytest.raises(IllPosedFrameError):
        correlation_decomposition(2.0, p)
