"""Classical amplitude equations and mean-field (first-order c-MoP) theory."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import SolverError
from .liouville import EvolveConfig

BELOW = "below"
ABOVE_PLUS = "above-plus"
ABOVE_MINUS = "above-minus"


@dataclass(frozen=True)
class ClassicalSolution:
    alpha_p: complex
    alpha_s: complex
    branch: str
    stable: bool


@dataclass(frozen=True)
class MeanFieldState:
    """Pump amplitude (lab frame) and signal fluctuation moments.

    ``n_s = <da^+ da>`` and ``m_s = <da^2>`` of a zero-mean Gaussian signal.
    """

    alpha_p: complex
    n_s: float
    m_s: complex

    @property
    def photon_number(self):
        return self.n_s

    def is_physical(self, tol=1e-10):
        return self.n_s * (self.n_s + 1) >= abs(self.m_s) ** 2 - tol


def classical_rhs(params, alpha_p, alpha_s):
    dap = params.eps_p - params.gamma_p * alpha_p - 0.5 * params.chi * alpha_s ** 2
    das = -params.gamma_s * alpha_s + params.chi * alpha_p * np.conj(alpha_s)
    return dap, das


def classical_jacobian(params, alpha_p, alpha_s):
    """Jacobian of the classical equations in (Re ap, Im ap, Re as, Im as)."""
    gp, gs, chi = params.gamma_p, params.gamma_s, params.chi
    pr, pi = np.real(alpha_p), np.imag(alpha_p)
    sr, si = np.real(alpha_s), np.imag(alpha_s)
    # d ap/dt = eps - gp ap - chi/2 (sr^2 - si^2 + 2i sr si)
    # d as/dt = -gs as + chi (pr + i pi)(sr - i si)
    return np.array(
        [
            [-gp, 0.0, -chi * sr, chi * si],
            [0.0, -gp, -chi * si, -chi * sr],
            [chi * sr, chi * si, -gs + chi * pr, chi * pi],
            [-chi * si, chi * sr, chi * pi, -gs - chi * pr],
        ]
    )


def _is_stable(params, ap, as_):
    ev = np.linalg.eigvals(classical_jacobian(params, ap, as_))
    return bool(np.all(ev.real < -1e-12))


def classical_fixed_points(params):
    """Fixed points of the classical amplitude equations.

    The below-threshold point is always returned.  For ``sigma > 1`` the two
    above-threshold points ``chi alpha_p = gamma_s``,
    ``alpha_s = +-sqrt(2 (eps_p - gamma_p gamma_s / chi) / chi)`` are added.
    At ``sigma == 1`` the branches meet and only the below point is returned.
    """
    ap = params.eps_p / params.gamma_p
    out = [ClassicalSolution(complex(ap), 0j, BELOW, params.sigma < 1)]
    if params.sigma > 1:
        ap_at = params.gamma_s / params.chi
        as_at = np.sqrt(2 * (params.eps_p - params.gamma_p * params.gamma_s / params.chi) / params.chi)
        stable = _is_stable(params, ap_at, as_at)
        out.append(ClassicalSolution(complex(ap_at), complex(as_at), ABOVE_PLUS, stable))
        out.append(ClassicalSolution(complex(ap_at), complex(-as_at), ABOVE_MINUS, stable))
    return out


def classical_dynamics(params, alpha_p0, alpha_s0, t_grid, cfg=None):
    cfg = cfg or EvolveConfig()

    def rhs(t, y):
        return np.array(classical_rhs(params, y[0], y[1]))

    sol = solve_ivp(rhs, (t_grid[0], t_grid[-1]), np.array([alpha_p0, alpha_s0], dtype=complex),
                    t_eval=t_grid, rtol=cfg.rtol, atol=cfg.atol, method=cfg.method)
    if not sol.success:
        raise SolverError(sol.message)
    return sol.y[0], sol.y[1]


def quadratic_signal_moments(mu, gamma_s):
    """Steady ``(n, m)`` of a damped degenerate parametric amplifier with gain ``mu = chi alpha_p``."""
    if abs(mu) >= gamma_s:
        raise ValueError("|mu| must be below gamma_s for a steady state")
    den = 2 * (gamma_s ** 2 - abs(mu) ** 2)
    return abs(mu) ** 2 / den, gamma_s * mu / den


def _mu_from_m(m, gamma_s):
    # positive root of 2 m mu^2 + gamma mu - 2 m gamma^2 = 0, cancellation-free
    return gamma_s * 4 * m / (np.sqrt(1 + 16 * m * m) + 1)


def meanfield_steady(params, tol=1e-12):
    """Self-consistent mean-field steady state.

    The signal is the steady Gaussian state of the quadratic master equation
    at gain ``mu = chi alpha_p``; the pump is coherent with
    ``alpha_p = (eps_p - chi/2 <a_s^2>) / gamma_p``.  Eliminating ``mu``
    leaves a monotone scalar equation in ``m_s`` solved by bracketing.
    """
    gs, gp, chi, eps = params.gamma_s, params.gamma_p, params.chi, params.eps_p
    if eps == 0:
        return MeanFieldState(0j, 0.0, 0j)

    def g(m):
        return _mu_from_m(m, gs) - chi * (eps - 0.5 * chi * m) / gp

    hi = 2 * eps / chi
    m = brentq(g, 0.0, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    mu = _mu_from_m(m, gs)
    n = mu * m / gs
    alpha_p = mu / chi
    res = abs(alpha_p - (eps - 0.5 * chi * m) / gp) / max(1.0, abs(alpha_p))
    if res > tol:
        raise SolverError(f"mean-field self-consistency residual {res:.3g}", residual=res)
    return MeanFieldState(complex(alpha_p), float(n), complex(m))


def meanfield_rhs(params, alpha_p, n_s, m_s):
    chi, gs = params.chi, params.gamma_s
    dap = params.eps_p - params.gamma_p * alpha_p - 0.5 * chi * m_s
    dn = -2 * gs * n_s + chi * (alpha_p * np.conj(m_s) + np.conj(alpha_p) * m_s)
    dm = -2 * gs * m_s + chi * alpha_p * (2 * n_s + 1)
    return dap, dn, dm


def meanfield_dynamics(params, state0, t_grid, cfg=None, dense=False):
    """Integrate the closed mean-field equations for ``(alpha_p, n_s, m_s)``.

    Returns a list of :class:`MeanFieldState`; with ``dense=True`` the scipy
    solution object (with ``sol`` interpolant) is returned as well.
    """
    cfg = cfg or EvolveConfig()
    t_grid = np.asarray(t_grid, dtype=float)
    y0 = np.array([state0.alpha_p, state0.n_s, state0.m_s], dtype=complex)

    def rhs(t, y):
        return np.array(meanfield_rhs(params, y[0], y[1].real, y[2]))

    sol = solve_ivp(rhs, (t_grid[0], t_grid[-1]), y0, t_eval=t_grid, rtol=cfg.rtol,
                    atol=cfg.atol, method=cfg.method, dense_output=dense)
    if not sol.success:
        raise SolverError(f"mean-field integration failed: {sol.message}")
    states = [MeanFieldState(sol.y[0, i], float(sol.y[1, i].real), sol.y[2, i])
              for i in range(sol.y.shape[1])]
    return (states, sol) if dense else states


def vacuum_state():
    return MeanFieldState(0j, 0.0, 0j)
