"""Eigen-decomposition of the signal correlation matrix.

For a traceless operator ``A`` the vector
``v(tau) = (<a^+ a>, <a^2>, <a^+2>)`` evaluated on ``exp(L_s tau) A`` obeys
``dv/dtau = M v`` with (rows and columns ordered as ``v``)::

    M = [[-2 g,      chi at^*, chi at ],
         [2 chi at,  -2 g,     0      ],
         [2 chi at^*, 0,       -2 g   ]]

where ``at`` is the frame amplitude of the pump and ``L_s`` contains the
gain ``chi/2 (at a^+2 - at^* a^2)``.  With ``at = r exp(i phi)`` the
eigenvectors are known in closed form, so ``M = U diag(lambda) U^-1`` is
assembled analytically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import IllPosedFrameError


@dataclass(frozen=True, eq=False)
class CorrelationDecomposition:
    """Eigenvalues ``lambdas`` and spectral projectors ``projectors[n] = U Pi_n U^-1``."""

    alpha_tilde: complex
    gamma_s: float
    chi: float
    lambdas: np.ndarray
    projectors: np.ndarray
    matrix: np.ndarray

    def propagator(self, tau):
        """``exp(M tau)`` rebuilt from the projectors."""
        return np.einsum("n,nij->ij", np.exp(self.lambdas * tau), self.projectors)

    def coefficients(self, u):
        """Third components ``[M_n u]_3`` for ``n = 1, 2, 3``."""
        return self.projectors[:, 2, :] @ np.asarray(u)


def correlation_matrix(alpha_tilde, gamma_s, chi):
    at = complex(alpha_tilde)
    g = gamma_s
    return np.array(
        [
            [-2 * g, chi * np.conj(at), chi * at],
            [2 * chi * at, -2 * g, 0.0],
            [2 * chi * np.conj(at), 0.0, -2 * g],
        ],
        dtype=complex,
    )


def correlation_decomposition(alpha_tilde, params):
    """Analytic eigenvalues and projectors of the signal correlation matrix.

    Raises
    ------
    IllPosedFrameError
        If ``chi |alpha_tilde| >= gamma_s``, where one eigenvalue has
        non-negative real part and the signal correlations do not decay.
    """
    gs, chi = params.gamma_s, params.chi
    r = abs(complex(alpha_tilde))
    if chi * r >= gs:
        raise IllPosedFrameError(
            f"chi |alpha_tilde| = {chi * r:.6g} must be below gamma_s = {gs:.6g}"
        )
    ph = np.exp(1j * np.angle(alpha_tilde)) if r > 0 else 1.0
    U = np.array(
        [
            [0.0, 1.0, 1.0],
            [ph, -ph, ph],
            [-np.conj(ph), -np.conj(ph), np.conj(ph)],
        ],
        dtype=complex,
    )
    lambdas = np.array([-2 * gs, -2 * gs - 2 * chi * r, -2 * gs + 2 * chi * r], dtype=complex)
    Uinv = np.linalg.inv(U)
    projectors = np.array([np.outer(U[:, n], Uinv[n, :]) for n in range(3)])
    return CorrelationDecomposition(complex(alpha_tilde), gs, chi, lambdas, projectors,
                                    correlation_matrix(alpha_tilde, gs, chi))
