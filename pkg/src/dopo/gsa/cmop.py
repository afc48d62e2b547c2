"""Gaussian state approximation of the c-MoP equations.

Only the signal state is taken to be Gaussian.  The tracked set is closed
exactly by the c-MoP structure except for the signal moments themselves:

* signal: ``<a_s>``, ``<a_s^+ a_s>``, ``<a_s^2>``;
* memory operator ``h_s``: ``Tr(O h_s)`` for ``O`` in
  ``(a, a^+, a^2, a^+ a, a^+2)``, which is everything the Born term of the
  signal equation needs, and the set is closed under the free signal
  Liouvillian;
* pump: the moment backend of :mod:`dopo.cmop.pump` (frame amplitude,
  ``n_p``, ``m_p`` and the ``h_{p,n}`` traces).

Third and fourth order signal moments in the kernels are factorized.
"""

from __future__ import annotations

import logging

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import root

from ..cmop.decomposition import correlation_decomposition
from ..cmop.pump import moment_rhs, moment_steady
from ..errors import SolverError
from ..liouville import EvolveConfig
from ..meanfield import ABOVE_PLUS, classical_fixed_points, meanfield_steady
from .branch import AT_PLUS, BT, GSA_CMOP, GaussianBranch
from .wick import GaussianModes, expect

log = logging.getLogger(__name__)

H_LABELS = ("a", "ad", "a2", "ada", "ad2")
_OPS = {"a": ["a"], "ad": ["ad"], "a2": ["a", "a"], "ada": ["ad", "a"], "ad2": ["ad", "ad"]}
_U_WORDS = (
    ("ad a ad ad", "a a ad ad", "ad ad ad ad"),
    ("ad ad ad a", "ad ad a a", "ad ad ad ad"),
    ("ad a a a", "a a a a", "ad ad a a"),
    ("a a ad a", "a a a a", "a a ad ad"),
)


class GsaCmopModel:
    """Right-hand sides of the Gaussian c-MoP system at one parameter point."""

    def __init__(self, params, alpha_tilde=None, born=True):
        self.params = params
        if alpha_tilde is None:
            alpha_tilde = meanfield_steady(params).alpha_p
        self.alpha_tilde = complex(alpha_tilde)
        self.decomp = correlation_decomposition(self.alpha_tilde, params)
        self.born = born
        self.c = 0.25 * params.chi ** 2 if born else 0.0
        at, chi, gs = self.alpha_tilde, params.chi, params.gamma_s
        # adjoint action of the free signal Liouvillian on the traced set
        L = np.zeros((5, 5), dtype=complex)
        L[0, 1], L[0, 0] = chi * at, -gs
        L[1, 0], L[1, 1] = chi * np.conj(at), -gs
        L[2, 3], L[2, 2] = 2 * chi * at, -2 * gs
        L[3, 4], L[3, 2], L[3, 3] = chi * at, chi * np.conj(at), -2 * gs
        L[4, 3], L[4, 4] = 2 * chi * np.conj(at), -2 * gs
        self.Lh = L

    @staticmethod
    def signal_state(alpha_s, N, S):
        return GaussianModes.single(alpha_s, N - abs(alpha_s) ** 2, S - alpha_s ** 2)

    def coefficients(self, st):
        u = np.array([[expect(w, st) for w in row] for row in _U_WORDS])
        s, sc, N = expect("a a", st), expect("ad ad", st), expect("ad a", st)
        sub = np.array([[sc * N, sc * s, sc * sc], [sc * N, sc * s, sc * sc],
                        [s * N, s * s, s * sc], [s * N, s * s, s * sc]])
        return np.array([self.decomp.coefficients(x) for x in u - sub])

    def h_source(self, st, n_p, m_p):
        """``Tr(O K_s rho_s)`` for the traced operators."""
        sc = expect("ad ad", st)
        out = np.empty(5, dtype=complex)
        for i, lab in enumerate(H_LABELS):
            o = " ".join(_OPS[lab])
            comm = expect(o + " a a", st) - expect("a a " + o, st)
            out[i] = (np.conj(m_p) * comm - n_p * expect(o + " ad ad", st)
                      + (1 + n_p) * expect("ad ad " + o, st) - sc * expect(o, st))
        return out

    def signal_rhs(self, alpha_s, N, S, H, A):
        chi, gs, c = self.params.chi, self.params.gamma_s, self.c
        B = self.alpha_tilde + A
        da = chi * B * np.conj(alpha_s) - gs * alpha_s - 2 * c * np.conj(H[0])
        dN = chi * 2 * np.real(B * np.conj(S)) - 2 * gs * N - 4 * c * np.real(H[2])
        dS = chi * B * (2 * N + 1) - 2 * gs * S - 4 * c * np.conj(H[3])
        return da, float(np.real(dN)), dS

    # --- full ODE -----------------------------------------------------------
    # layout: alpha_s, N, S, H(5), A, n_p, m_p, T(15)

    def rhs(self, t, y):
        alpha_s, N, S = y[0], y[1].real, y[2]
        H = y[3:8]
        A, n_p, m_p = y[8], y[9].real, y[10]
        T = y[11:].reshape(3, 5)
        st = self.signal_state(alpha_s, N, S)
        da, dN, dS = self.signal_rhs(alpha_s, N, S, H, A)
        dH = (self.Lh - self.params.gamma_p * np.eye(5)) @ H + self.h_source(st, n_p, m_p)
        coeffs = self.coefficients(st)
        dA, dn, dm, dT = moment_rhs(self.params, self.alpha_tilde, self.decomp.lambdas, coeffs,
                                    S, A, n_p, m_p, T, self.born)
        return np.concatenate(([da, dN, dS], dH, [dA, np.real(dn), dm], dT.ravel()))

    def vacuum(self):
        y = np.zeros(26, dtype=complex)
        y[8] = -self.alpha_tilde
        return y

    # --- steady state -------------------------------------------------------

    def steady_closure(self, alpha_s, N, S, n_p, m_p):
        """Pump and memory moments for given signal moments and trial ``(n_p, m_p)``."""
        st = self.signal_state(alpha_s, N, S)
        coeffs = self.coefficients(st)
        A, n_new, m_new, T = moment_steady(self.params, self.alpha_tilde, self.decomp.lambdas,
                                           coeffs, S, n_p, m_p, self.born)
        src = self.h_source(st, n_p, m_p)
        H = -np.linalg.solve(self.Lh - self.params.gamma_p * np.eye(5), src)
        return A, n_new, m_new, T, H

    def residual(self, alpha_s, N, S, n_p, m_p):
        A, n_new, m_new, T, H = self.steady_closure(alpha_s, N, S, n_p, m_p)
        da, dN, dS = self.signal_rhs(alpha_s, N, S, H, A)
        return np.array([da, dN, dS, n_new - n_p, m_new - m_p])


def _pack(alpha_s, N, S, n_p, m_p, symmetric):
    base = [N, S.real, S.imag, n_p, m_p.real, m_p.imag]
    return np.array(base if symmetric else [alpha_s.real, alpha_s.imag] + base, dtype=float)


def _unpack(x, symmetric):
    if symmetric:
        return 0j, x[0], x[1] + 1j * x[2], x[3], x[4] + 1j * x[5]
    return x[0] + 1j * x[1], x[2], x[3] + 1j * x[4], x[5], x[6] + 1j * x[7]


def _residual_vec(model, x, symmetric, scale):
    a, N, S, n, m = _unpack(x, symmetric)
    r = model.residual(a, N, S, n, m)
    da, dN, dS, dn, dm = r
    out = [dN.real, dS.real, dS.imag, dn.real, dm.real, dm.imag]
    if not symmetric:
        out = [da.real, da.imag] + out
    return np.array(out) / scale


def _make_branch(model, x, symmetric, label, res):
    a, N, S, n_p, m_p = _unpack(x, symmetric)
    A, _, _, T, H = model.steady_closure(a, N, S, n_p, m_p)
    return GaussianBranch(GSA_CMOP, label, a, model.alpha_tilde + A, float(N - abs(a) ** 2),
                          float(n_p), S - a ** 2, m_p, {"h": dict(zip(H_LABELS, H)), "pump_aux": T},
                          True, res, sigma=model.params.sigma)


def solve_gsa_cmop_branch(model, seed, symmetric, tol=1e-10):
    """Solve the steady Gaussian c-MoP equations from ``seed = (alpha_s, N, S, n_p, m_p)``."""
    scale = max(1.0, abs(seed[1]))
    x0 = _pack(*seed, symmetric)
    sol = root(lambda x: _residual_vec(model, x, symmetric, scale), x0, method="hybr",
               options={"xtol": 1e-14, "maxfev": 4000})
    res = float(np.abs(_residual_vec(model, sol.x, symmetric, scale)).max())
    if not np.isfinite(res) or res > tol:
        raise SolverError(f"GSA c-MoP solve did not converge (residual {res:.3g})", residual=res)
    return sol.x, res


def gsa_cmop(params, alpha_tilde=None, born=True, tol=1e-10):
    """Physical steady branches of the Gaussian c-MoP equations.

    BT is seeded from mean-field, the AT pair from the classical
    above-threshold point.  Unconverged or unphysical solutions are
    logged and dropped.
    """
    model = GsaCmopModel(params, alpha_tilde, born)
    out = []
    mf = meanfield_steady(params)
    try:
        x, res = solve_gsa_cmop_branch(model, (0j, mf.n_s, mf.m_s, 0.0, 0j), True, tol)
        br = _make_branch(model, x, True, BT, res)
        if br.is_physical():
            out.append(br)
        else:
            log.info("BT solution rejected as unphysical")
    except SolverError as exc:
        log.info("BT solve failed: %s", exc)
    cl = {c.branch: c for c in classical_fixed_points(params)}
    if ABOVE_PLUS in cl:
        a = cl[ABOVE_PLUS].alpha_s
        try:
            x, res = solve_gsa_cmop_branch(model, (a, abs(a) ** 2, a ** 2, 0.0, 0j), False, tol)
            br = _make_branch(model, x, False, AT_PLUS, res)
            if abs(br.alpha_s) > 1e-6 and br.alpha_s.real < 0:
                br = br.mirrored()
                br = GaussianBranch(br.method, AT_PLUS, br.alpha_s, br.alpha_p, br.n_s, br.n_p,
                                    br.m_s, br.m_p, br.born_aux, True, res, sigma=br.sigma)
            if abs(br.alpha_s) > 1e-6 and br.is_physical():
                out += [br, br.mirrored()]
        except SolverError as exc:
            log.info("AT solve failed: %s", exc)
    return out


def gsa_cmop_dynamics(params, t_grid, cfg=None, alpha_tilde=None, born=True):
    """Integrate the Gaussian c-MoP equations from the lab vacuum.

    Returns a list of :class:`GaussianBranch` snapshots (``branch='BT'``).
    """
    cfg = cfg or EvolveConfig()
    model = GsaCmopModel(params, alpha_tilde, born)
    t_grid = np.asarray(t_grid, dtype=float)
    sol = solve_ivp(model.rhs, (t_grid[0], t_grid[-1]), model.vacuum(), t_eval=t_grid,
                    rtol=cfg.rtol, atol=cfg.atol, method=cfg.method)
    if not sol.success:
        raise SolverError(f"GSA c-MoP integration failed: {sol.message}")
    out = []
    for i in range(sol.y.shape[1]):
        y = sol.y[:, i]
        a, N, S = y[0], y[1].real, y[2]
        out.append(GaussianBranch(GSA_CMOP, BT, a, model.alpha_tilde + y[8],
                                  float(N - abs(a) ** 2), float(y[9].real), S - a ** 2, y[10],
                                  {"h": dict(zip(H_LABELS, y[3:8]))}, True, 0.0,
                                  sigma=params.sigma))
    return out
