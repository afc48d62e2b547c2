"""Standard linearization about the classical fixed points."""

from __future__ import annotations

import numpy as np
import scipy.linalg as la

from ..meanfield import ABOVE_MINUS, ABOVE_PLUS, BELOW, classical_fixed_points
from .branch import AT_MINUS, AT_PLUS, BT, STD, GaussianBranch

_BRANCH = {BELOW: BT, ABOVE_PLUS: AT_PLUS, ABOVE_MINUS: AT_MINUS}


def linear_drift(params, alpha_p, alpha_s):
    """``(B, C)`` with ``d(da_p, da_s)/dt = B (da_p, da_s) + C (da_p^+, da_s^+)``."""
    gp, gs, chi = params.gamma_p, params.gamma_s, params.chi
    B = np.array([[-gp, -chi * alpha_s], [chi * np.conj(alpha_s), -gs]], dtype=complex)
    C = np.array([[0.0, 0.0], [0.0, chi * alpha_p]], dtype=complex)
    return B, C


def quadrature_drift(B, C):
    """Real drift matrix on ``(x_1, p_1, x_2, p_2)`` with ``a = (x + i p)/2``."""
    N = B.shape[0]
    Az = np.block([[B, C], [np.conj(C), np.conj(B)]])
    T = np.zeros((2 * N, 2 * N), dtype=complex)
    for k in range(N):
        T[2 * k, k], T[2 * k, N + k] = 1.0, 1.0
        T[2 * k + 1, k], T[2 * k + 1, N + k] = -1j, 1j
    AR = T @ Az @ np.linalg.inv(T)
    return AR.real


def lyapunov_moments(B, C, gammas):
    """Steady symmetrized covariance of a linear system driven by vacuum loss.

    Returns ``(V, stable)``; ``V`` is ``None`` when the drift has an
    eigenvalue with non-negative real part.
    """
    AR = quadrature_drift(B, C)
    if np.max(np.linalg.eigvals(AR).real) >= -1e-12:
        return None, False
    D = np.diag(np.repeat(2.0 * np.asarray(gammas, dtype=float), 2))
    V = la.solve_continuous_lyapunov(AR, -D)
    return 0.5 * (V + V.T), True


def mode_moments(V, k):
    """``(n, m)`` of mode ``k`` from the quadrature covariance."""
    vx, vp, c = V[2 * k, 2 * k], V[2 * k + 1, 2 * k + 1], V[2 * k, 2 * k + 1]
    return 0.25 * (vx + vp) - 0.5, 0.25 * (vx - vp) + 0.5j * c


def std_linearization(params):
    """Linearized fluctuations about every stable classical fixed point.

    Below threshold the BT point is returned; above it the AT pair.  At
    ``sigma == 1`` the BT fluctuations have no steady state: the branch is
    returned with ``converged=False``, ``diverged=True`` and infinite
    moments.
    """
    out = []
    for sol in classical_fixed_points(params):
        at_threshold = sol.branch == BELOW and np.isclose(params.sigma, 1.0, rtol=0, atol=1e-14)
        if not sol.stable and not at_threshold:
            continue
        B, C = linear_drift(params, sol.alpha_p, sol.alpha_s)
        V, stable = lyapunov_moments(B, C, (params.gamma_p, params.gamma_s))
        if not stable:
            out.append(GaussianBranch(STD, _BRANCH[sol.branch], sol.alpha_s, sol.alpha_p, np.inf,
                                      np.inf, np.inf, np.inf, converged=False, residual=np.inf,
                                      diverged=True, sigma=params.sigma))
            continue
        n_p, m_p = mode_moments(V, 0)
        n_s, m_s = mode_moments(V, 1)
        out.append(GaussianBranch(STD, _BRANCH[sol.branch], sol.alpha_s, sol.alpha_p, float(n_s),
                                  float(n_p), complex(m_s), complex(m_p), sigma=params.sigma,
                                  born_aux={"covariance": V}))
    return out
