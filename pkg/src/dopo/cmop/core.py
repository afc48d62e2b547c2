"""Time-local c-MoP equations for the signal density matrix coupled to the pump.

Frame: the pump is displaced by the constant ``alpha_tilde`` (mean-field
steady amplitude by default).  The signal obeys::

    d rho_s/dt = chi/2 [B a^+2 - B^* a^2, rho_s] + gamma_s D_a rho_s
                 + (chi/2)^2 ([a^2, h_s] + h.c.),           B = alpha_tilde + <a_p>
    d h_s/dt   = -gamma_p h_s + L_s h_s + K_s rho_s
    K_s rho    = m_p^* [da^2, rho] - n_p da^+2 rho + (1 + n_p) rho da^+2

with ``L_s`` the gain at ``alpha_tilde`` plus signal loss, ``n_p``, ``m_p``
the pump fluctuation moments and ``da^2 = a^2 - <a^2>``.  The pump is
handled by one of the backends in :mod:`dopo.cmop.pump`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp
from scipy.optimize import root

from .. import fock
from ..errors import SolverError, TruncationError
from ..liouville import (EvolveConfig, build_liouvillian, parity_sector, steady_state, unvec,
                         vec)
from ..meanfield import meanfield_steady
from ..observables import g2 as _g2
from .decomposition import correlation_decomposition
from .pump import MatrixPump, PumpMoments, moment_rhs, moment_steady

log = logging.getLogger(__name__)


class SignalOps:
    """Ladder operators of the signal mode with banded fast paths.

    Every operator used by the signal equations has a single non-zero
    diagonal, so products with dense matrices reduce to shifted slices.
    """

    def __init__(self, dim):
        lad = fock.Ladder(dim)
        self.dim = lad.dim
        self.lad = lad
        a2, ad2, n = lad.a2, lad.ad2, lad.n
        self.words = {
            "n": n,
            "a2": a2,
            "ad2": ad2,
            "n.ad2": (n @ ad2).tocsr(),
            "ad2.n": (ad2 @ n).tocsr(),
            "n.a2": (n @ a2).tocsr(),
            "a2.n": (a2 @ n).tocsr(),
            "a2.ad2": (a2 @ ad2).tocsr(),
            "ad2.a2": (ad2 @ a2).tocsr(),
            "ad4": (ad2 @ ad2).tocsr(),
            "a4": (a2 @ a2).tocsr(),
        }
        # Tr(O rho) = diag(O, d) . diag(rho, -d)
        self._bands = {}
        for name, op in self.words.items():
            coo = op.tocoo()
            d = int(coo.col[0] - coo.row[0]) if coo.nnz else 0
            self._bands[name] = (d, np.diagonal(op.toarray(), d).copy())
        self.sq = np.sqrt(np.arange(1, self.dim, dtype=float))
        self.s2 = self.sq[:-1] * self.sq[1:]
        nv = np.arange(self.dim, dtype=float)
        self.n_sum = nv[:, None] + nv[None, :]
        self.sq_outer = np.outer(self.sq, self.sq)

    def expect(self, name, rho):
        d, w = self._bands[name]
        return w @ np.diagonal(rho, -d)

    # products with dense matrices
    def left_a2(self, x):
        out = np.zeros_like(x)
        out[:-2] = self.s2[:, None] * x[2:]
        return out

    def left_ad2(self, x):
        out = np.zeros_like(x)
        out[2:] = self.s2[:, None] * x[:-2]
        return out

    def right_a2(self, x):
        out = np.zeros_like(x)
        out[:, 2:] = x[:, :-2] * self.s2
        return out

    def right_ad2(self, x):
        out = np.zeros_like(x)
        out[:, :-2] = x[:, 2:] * self.s2
        return out

    def dissipator(self, x):
        """``2 a x a^+ - n x - x n``."""
        out = -self.n_sum * x
        out[:-1, :-1] += 2 * self.sq_outer * x[1:, 1:]
        return out


_OPS_CACHE = {}


def signal_ops(dim):
    if dim not in _OPS_CACHE:
        _OPS_CACHE[dim] = SignalOps(dim)
    return _OPS_CACHE[dim]


@dataclass(frozen=True, eq=False)
class SignalCorrelators:
    """Coefficients ``d_{s,n}`` of the four correlator families.

    ``coeffs[f, n]`` with ``f`` in ``(d+, d~+, d-, d~-)``; ``u[f]`` is the
    corresponding initial-condition vector.
    """

    coeffs: np.ndarray
    u: np.ndarray

    @property
    def d_plus(self):
        return self.coeffs[0]

    @property
    def dt_plus(self):
        return self.coeffs[1]

    @property
    def d_minus(self):
        return self.coeffs[2]

    @property
    def dt_minus(self):
        return self.coeffs[3]


def correlator_vectors(rho_s, ops=None):
    """``u_A = (Tr a^+a A, Tr a^2 A, Tr a^+2 A)`` for ``A`` in
    ``(da^+2 rho, rho da^+2, da^2 rho, rho da^2)``."""
    ops = ops or signal_ops(rho_s.shape[0])
    e = {k: ops.expect(k, rho_s) for k in ops.words}
    s, sc, N = e["a2"], e["ad2"], e["n"]
    return np.array(
        [
            [e["n.ad2"] - sc * N, e["a2.ad2"] - sc * s, e["ad4"] - sc * sc],
            [e["ad2.n"] - sc * N, e["ad2.a2"] - sc * s, e["ad4"] - sc * sc],
            [e["n.a2"] - s * N, e["a4"] - s * s, e["ad2.a2"] - s * sc],
            [e["a2.n"] - s * N, e["a4"] - s * s, e["a2.ad2"] - s * sc],
        ],
        dtype=complex,
    )


def signal_correlator_coefficients(rho_s, decomp, ops=None):
    """Third components of ``M_n u_A`` for the four correlator families."""
    u = correlator_vectors(rho_s, ops)
    coeffs = np.array([decomp.coefficients(uf) for uf in u])
    return SignalCorrelators(coeffs, u)


# --- state ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CmopState:
    """Signal density matrix, its memory operator and the pump moments (frame values)."""

    rho_s: np.ndarray
    h_s: np.ndarray
    pump: PumpMoments = field(default_factory=PumpMoments)
    time: float = 0.0
    alpha_tilde: complex = 0j

    @property
    def dim_s(self):
        return self.rho_s.shape[0]

    @property
    def alpha_p_lab(self):
        return self.alpha_tilde + self.pump.alpha_p

    @property
    def photon_number(self):
        return float(np.real(np.diag(self.rho_s) @ np.arange(self.dim_s)))

    @property
    def g2(self):
        return _g2(self.rho_s)

    @property
    def alpha_s(self):
        lad = signal_ops(self.dim_s).lad
        return complex(lad.expect(lad.a, self.rho_s))

    def min_eigenvalue(self):
        return float(np.linalg.eigvalsh(fock.hermitize(self.rho_s))[0])

    def top_population(self, levels=2):
        return float(np.real(np.diag(self.rho_s)[-levels:]).sum())


def vacuum_state(dim_s, alpha_tilde):
    """Lab-frame vacuum: ``<a_p> = -alpha_tilde`` in the displaced frame."""
    rho = fock.fock_dm(dim_s, 0)
    return CmopState(rho, np.zeros_like(rho), PumpMoments(alpha_p=-complex(alpha_tilde)),
                     0.0, complex(alpha_tilde))


def pack(state):
    p = state.pump
    return np.concatenate((state.rho_s.ravel(), state.h_s.ravel(),
                           [p.alpha_p, p.n_p, p.m_p], p.aux.ravel())).astype(complex)


def unpack(y, dim_s, alpha_tilde, time=0.0):
    d2 = dim_s * dim_s
    rho = y[:d2].reshape(dim_s, dim_s)
    h = y[d2:2 * d2].reshape(dim_s, dim_s)
    A, n, m = y[2 * d2:2 * d2 + 3]
    T = y[2 * d2 + 3:].reshape(3, 5)
    return CmopState(rho, h, PumpMoments(A, float(np.real(n)), m, T), time, alpha_tilde)


# --- right-hand side --------------------------------------------------------


class CmopSystem:
    """Precomputed operators for one parameter point and signal truncation."""

    def __init__(self, params, dim_s, alpha_tilde=None, born=True):
        self.params = params
        self.dim_s = fock._check_dim(dim_s)
        if alpha_tilde is None:
            alpha_tilde = meanfield_steady(params).alpha_p
        self.alpha_tilde = complex(alpha_tilde)
        self.decomp = correlation_decomposition(self.alpha_tilde, params)
        self.ops = signal_ops(self.dim_s)
        self.born = born
        self.c = 0.25 * params.chi ** 2 if born else 0.0
        self.half_chi = 0.5 * params.chi
        gs, gp = params.gamma_s, params.gamma_p
        ops = self.ops
        self._loss_rho = gs * ops.n_sum
        self._loss_h = gs * ops.n_sum + gp
        self._feed = 2 * gs * ops.sq_outer

    # signal pieces shared by both backends
    def signal_rhs(self, rho, h, A, n_p, m_p):
        """``(d rho_s/dt, d h_s/dt, <a_s^2>)`` with shifted-slice accumulation.

        ``a^2`` and ``a^+2`` have one band, so every product below is a
        slice scaled by ``sqrt(k (k - 1))`` along rows or columns.
        """
        ops = self.ops
        w, wc = ops.s2[:, None], ops.s2
        hc = self.half_chi
        gB = hc * (self.alpha_tilde + A)
        gBc = np.conj(gB)
        ga = hc * self.alpha_tilde
        gac = np.conj(ga)
        s = ops.expect("a2", rho)
        sc = ops.expect("ad2", rho)

        # X = [a^2, h], needed by both equations
        X = np.empty_like(h)
        np.multiply(w, h[2:], out=X[:-2])
        X[-2:] = 0
        X[:, 2:] -= h[:, :-2] * wc

        drho = -self._loss_rho * rho
        drho[:-1, :-1] += self._feed * rho[1:, 1:]
        drho[2:] += (gB * w) * rho[:-2]
        drho[:, :-2] -= rho[:, 2:] * (gB * wc)
        drho[:-2] -= (gBc * w) * rho[2:]
        drho[:, 2:] += rho[:, :-2] * (gBc * wc)
        drho += self.c * X
        drho += self.c * X.conj().T

        # kernel with da^2 = a^2 - <a^2>; the c-number parts reduce to -<a^+2> rho
        mc = np.conj(m_p)
        dh = -self._loss_h * h
        dh -= sc * rho
        dh[:-1, :-1] += self._feed * h[1:, 1:]
        dh[:-2] += (mc * w) * rho[2:]
        dh[:, 2:] -= rho[:, :-2] * (mc * wc)
        dh[2:] -= (n_p * w) * rho[:-2]
        dh[:, :-2] += rho[:, 2:] * ((1 + n_p) * wc)
        dh[2:] += (ga * w) * h[:-2]
        dh[:, :-2] -= h[:, 2:] * (ga * wc)
        dh -= gac * X
        return drho, dh, s

    def rhs(self, state):
        """Derivative of a :class:`CmopState` (moment backend)."""
        p = state.pump
        drho, dh, s = self.signal_rhs(state.rho_s, state.h_s, p.alpha_p, p.n_p, p.m_p)
        corr = signal_correlator_coefficients(state.rho_s, self.decomp, self.ops)
        dA, dn, dm, dT = moment_rhs(self.params, self.alpha_tilde, self.decomp.lambdas,
                                    corr.coeffs, s, p.alpha_p, p.n_p, p.m_p, p.aux, self.born)
        return CmopState(drho, dh, PumpMoments(dA, float(np.real(dn)), dm, dT), state.time,
                         self.alpha_tilde)

    def rhs_vector(self, t, y):
        """Flat derivative in the :func:`pack` layout."""
        d = self.dim_s
        d2 = d * d
        rho = y[:d2].reshape(d, d)
        h = y[d2:2 * d2].reshape(d, d)
        A, n, m = y[2 * d2:2 * d2 + 3]
        T = y[2 * d2 + 3:].reshape(3, 5)
        drho, dh, s = self.signal_rhs(rho, h, A, n.real, m)
        corr = signal_correlator_coefficients(rho, self.decomp, self.ops)
        dA, dn, dm, dT = moment_rhs(self.params, self.alpha_tilde, self.decomp.lambdas,
                                    corr.coeffs, s, A, n.real, m, T, self.born)
        out = np.empty_like(y)
        out[:d2] = drho.ravel()
        out[d2:2 * d2] = dh.ravel()
        out[2 * d2:2 * d2 + 3] = dA, np.real(dn), dm
        out[2 * d2 + 3:] = dT.ravel()
        return out


def cmop_rhs(state, params, alpha_tilde, decomp=None, born=True):
    """Derivative of every field of ``state`` under the c-MoP equations."""
    system = CmopSystem(params, state.dim_s, alpha_tilde, born)
    if decomp is not None:
        system.decomp = decomp
    return system.rhs(state)


# --- integration ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CmopTrajectory:
    times: np.ndarray
    states: list
    backend: str
    pump_matrix: list = None

    def photon_numbers(self):
        return np.array([s.photon_number for s in self.states])


def _check_grid(t_grid):
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 1 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly increasing")
    return t_grid


def cmop_integrate(params, dim_s, t_grid, cfg=None, backend="moments", dim_p=8,
                   alpha_tilde=None, born=True, state0=None, pump_tol=1e-6):
    """Integrate the c-MoP equations from the factorized lab vacuum.

    Parameters
    ----------
    backend : {"moments", "matrix"}
        Pump representation.  Both return the same public data (the matrix
        backend converts its pump state to moments at every output time).
    dim_p : int
        Pump truncation of the matrix backend (co-moving frame).
    pump_tol : float
        Largest allowed population of the top pump level (matrix backend);
        :class:`TruncationError` is raised above it.
    born : bool
        ``False`` drops every ``(chi/2)^2`` term, which reduces the
        equations to mean-field theory.
    """
    cfg = cfg or EvolveConfig()
    t_grid = _check_grid(t_grid)
    system = CmopSystem(params, dim_s, alpha_tilde, born)
    st0 = state0 or vacuum_state(system.dim_s, system.alpha_tilde)
    if backend == "moments":
        y0 = pack(st0)
        fun = system.rhs_vector
    elif backend == "matrix":
        mp = MatrixPump(params, system.alpha_tilde, dim_p, born)
        d2 = system.dim_s ** 2
        y0 = np.concatenate((st0.rho_s.ravel(), st0.h_s.ravel(), mp.initial()))
        if state0 is not None:
            raise ValueError("the matrix backend always starts from the vacuum")

        def fun(t, y):
            rho = y[:d2].reshape(system.dim_s, system.dim_s)
            h = y[d2:2 * d2].reshape(system.dim_s, system.dim_s)
            py = y[2 * d2:]
            A, n, m, _ = mp.moments(py, check=False)
            drho, dh, s = system.signal_rhs(rho, h, A, n, m)
            corr = signal_correlator_coefficients(rho, system.decomp, system.ops)
            dp = mp.rhs(py, s, system.decomp.lambdas, corr.coeffs)
            return np.concatenate((drho.ravel(), dh.ravel(), dp))
    else:
        raise ValueError(f"unknown backend {backend!r}")

    if t_grid.size == 1:
        ys = y0[:, None]
    else:
        sol = solve_ivp(fun, (t_grid[0], t_grid[-1]), y0, t_eval=t_grid, rtol=cfg.rtol,
                        atol=cfg.atol, method=cfg.method)
        if not sol.success:
            raise SolverError(f"c-MoP integration failed: {sol.message}")
        ys = sol.y
    states = []
    for i, t in enumerate(t_grid):
        y = ys[:, i]
        if backend == "moments":
            st = unpack(y, system.dim_s, system.alpha_tilde, t)
        else:
            d2 = system.dim_s ** 2
            A, n, m, T = mp.moments(y[2 * d2:], tol=pump_tol)
            st = CmopState(y[:d2].reshape(system.dim_s, system.dim_s),
                           y[d2:2 * d2].reshape(system.dim_s, system.dim_s),
                           PumpMoments(A, n, m, T), t, system.alpha_tilde)
        states.append(replace(st, rho_s=fock.hermitize(st.rho_s)))
    return CmopTrajectory(t_grid, states, backend)


def rhs_norm(system, state):
    """Largest absolute entry of the c-MoP derivative."""
    return float(np.abs(pack(system.rhs(state))).max())


def cmop_relax(params, dim_s, cfg=None, chunk=20.0, alpha_tilde=None, born=True, state0=None):
    """Integrate until ``max |d state/dt| < cfg.steady_residual`` or ``cfg.max_time``."""
    cfg = cfg or EvolveConfig()
    system = CmopSystem(params, dim_s, alpha_tilde, born)
    st = state0 or vacuum_state(system.dim_s, system.alpha_tilde)
    t = st.time
    while True:
        res = rhs_norm(system, st)
        if res < cfg.steady_residual:
            return st, res
        if t >= cfg.max_time:
            raise SolverError(f"no steady state by t={t:g} (residual {res:.3g})", residual=res)
        y0 = pack(st)
        sol = solve_ivp(system.rhs_vector, (t, t + chunk), y0, rtol=cfg.rtol, atol=cfg.atol,
                        method=cfg.method, t_eval=[t + chunk])
        if not sol.success:
            raise SolverError(f"c-MoP integration failed: {sol.message}")
        t += chunk
        st = unpack(sol.y[:, -1], system.dim_s, system.alpha_tilde, t)
        st = replace(st, rho_s=fock.hermitize(st.rho_s))


# --- direct steady state ----------------------------------------------------


@dataclass(frozen=True, eq=False)
class CmopSteady:
    state: CmopState
    residual: float
    iterations: int
    method: str
    chi: float = float("nan")

    @property
    def photon_number(self):
        return self.state.photon_number

    @property
    def g2(self):
        return self.state.g2

    @property
    def chi_alpha_p(self):
        """``chi * Re<a_p>`` in the lab frame."""
        return self.chi * float(np.real(self.state.alpha_p_lab))


class _SignalBlock:
    """Real sparse operators of the steady signal problem in the even Z2 block.

    With real parameters and a real frame every quantity is real, the
    hermitian conjugate becomes a transpose and the problem is linear in
    ``(rho_s, h_s)`` once ``(A, n_p, m_p, <a^2>)`` are fixed.
    """

    def __init__(self, system):
        self.system = system
        D = system.dim_s
        lad = system.ops.lad
        p = system.params
        self.idx = parity_sector(1, D)
        idx = self.idx
        N = D * D
        perm = np.arange(N).reshape(D, D, order="F").ravel(order="C")
        P = sp.csr_matrix((np.ones(N), (np.arange(N), perm)), shape=(N, N))

        def restrict(M):
            return sp.csr_matrix(M)[idx][:, idx].real.tocsr()

        def L(op):
            return sp.kron(sp.identity(D), op, format="csr")

        def R(op):
            return sp.kron(op.T, sp.identity(D), format="csr")

        diss = build_liouvillian([], [(p.gamma_s, lad.a)]).matrix
        self.diss = restrict(diss)
        half = 0.5 * p.chi
        self.gain_unit = restrict(half * ((L(lad.ad2) - R(lad.ad2)) - (L(lad.a2) - R(lad.a2))))
        X = L(lad.a2) - R(lad.a2)
        # [a^2, h] + [a^2, h]^T for real h
        self.born = restrict(X + P @ X) * system.c
        self.comm_a2 = restrict(L(lad.a2) - R(lad.a2))
        self.left_ad2 = restrict(L(lad.ad2))
        self.right_ad2 = restrict(R(lad.ad2))
        self.eye = sp.identity(len(idx), format="csr")
        self.trace_row = vec(np.eye(D))[idx].real
        self.a2_row = vec(lad.a2.T.toarray())[idx].real

    def solve(self, A, n_p, m_p, s):
        sysm = self.system
        at = sysm.alpha_tilde.real
        gp = sysm.params.gamma_p
        B = at + A
        Lrho = B * self.gain_unit + self.diss
        Lh = -gp * self.eye + at * self.gain_unit + self.diss
        K = m_p * self.comm_a2 - n_p * self.left_ad2 + (1 + n_p) * self.right_ad2 - s * self.eye
        top = sp.hstack([Lrho, self.born])
        bottom = sp.hstack([K, Lh])
        M = sp.vstack([top, bottom]).tolil()
        M[0, :] = 0
        M[0, :len(self.idx)] = self.trace_row
        rhs = np.zeros(2 * len(self.idx))
        rhs[0] = 1.0
        try:
            x = spla.spsolve(M.tocsc(), rhs)
        except RuntimeError as exc:
            raise SolverError(f"steady signal solve failed: {exc}") from exc
        if not np.all(np.isfinite(x)):
            raise SolverError("steady signal solve returned non-finite values")
        k = len(self.idx)
        D = sysm.dim_s
        rho = np.zeros(D * D)
        h = np.zeros(D * D)
        rho[self.idx] = x[:k]
        h[self.idx] = x[k:]
        return unvec(rho, D), unvec(h, D)


def cmop_steady(params, dim_s, alpha_tilde=None, born=True, tol=1e-10, method="direct",
                cfg=None, max_top_population=None, seed=None):
    """Steady state of the c-MoP equations.

    ``method="direct"`` solves the stationary equations: the signal pair
    ``(rho_s, h_s)`` is obtained from a sparse linear solve for fixed pump
    moments and ``<a_s^2>``; these three real scalars are then made
    self-consistent with a Powell hybrid root finder.  ``method="integrate"``
    relaxes the time-dependent equations from the vacuum instead.

    ``max_top_population`` (optional) raises :class:`TruncationError` if the
    two highest signal levels carry more population than this.  ``seed``
    is an optional warm start ``(n_p, m_p, <a_s^2>)`` for the direct method.
    """
    system = CmopSystem(params, dim_s, alpha_tilde, born)
    if method == "integrate":
        st, res = cmop_relax(params, dim_s, cfg, alpha_tilde=system.alpha_tilde, born=born)
        out = CmopSteady(st, res, 0, "integrate", params.chi)
    elif method == "direct":
        out = _direct_steady(system, tol, seed)
    else:
        raise ValueError(f"unknown method {method!r}")
    if max_top_population is not None and out.state.top_population() > max_top_population:
        raise TruncationError(
            f"signal truncation {dim_s} too small: top population "
            f"{out.state.top_population():.3g}", "photon_number")
    return out


def _direct_steady(system, tol, seed=None):
    p = system.params
    if abs(system.alpha_tilde.imag) > 1e-14:
        raise ValueError("direct steady solver needs a real frame amplitude")
    block = _SignalBlock(system)
    lam = system.decomp.lambdas
    mf = meanfield_steady(p)
    ep = p.eps_p - p.gamma_p * system.alpha_tilde.real
    calls = [0]
    memo = {}

    def evaluate(x):
        key = tuple(np.asarray(x, dtype=float))
        if key in memo:
            return memo[key]
        n_p, m_p, s = key
        A = (ep - 0.5 * p.chi * s) / p.gamma_p
        rho, h = block.solve(A, n_p, m_p, s)
        calls[0] += 1
        corr = signal_correlator_coefficients(rho, system.decomp, system.ops)
        s_new = float(np.real(block.a2_row @ vec(rho)[block.idx]))
        _, n_new, m_new, T = moment_steady(p, system.alpha_tilde, lam, corr.coeffs, s, n_p, m_p,
                                           system.born)
        memo.clear()
        memo[key] = (rho, h, A, n_new, m_new, s_new, T)
        return memo[key]

    def resid(x):
        _, _, _, n_new, m_new, s_new, _ = evaluate(x)
        return np.array([n_new - x[0], np.real(m_new) - x[1], s_new - x[2]])

    x0 = np.array([0.0, 0.0, mf.m_s.real])
    if seed is not None:
        x0 = np.real(np.asarray(seed, dtype=complex))
    if p.eps_p == 0:
        x0[:] = 0.0
    scale = max(1.0, abs(x0[2]))
    sol = root(resid, x0, method="hybr", options={"xtol": tol * 1e-2, "maxfev": 200})
    r = resid(sol.x)
    res = float(np.abs(r).max() / scale)
    if not np.isfinite(res) or res > tol:
        raise SolverError(f"c-MoP steady self-consistency residual {res:.3g}", residual=res)
    rho, h, A, n_new, m_new, _, T = evaluate(sol.x)
    st = CmopState(fock.hermitize(rho.astype(complex)), h.astype(complex),
                   PumpMoments(complex(A), float(n_new), complex(m_new), T), np.inf,
                   system.alpha_tilde)
    return CmopSteady(st, res, calls[0], "direct", p.chi)


# --- adiabatic limit --------------------------------------------------------


def adiabatic_liouvillian(params, dim_s):
    """Effective signal Liouvillian for a fast pump.

    ``gamma_s^-1 d rho/dt = sigma/2 [a^+2 - a^2, rho] + g^2/4 D_{a^2} rho + D_a rho``
    """
    lad = fock.Ladder(dim_s)
    gs = params.gamma_s
    return build_liouvillian(
        [(0.5 * gs * params.sigma, (lad.ad2 - lad.a2).tocsr())],
        [(gs * params.g2coupling / 4, lad.a2), (gs, lad.a)],
    )


def adiabatic_steady(params, dim_s):
    L = adiabatic_liouvillian(params, dim_s)
    return steady_state(L, check_unique=False, sector=parity_sector(1, dim_s))
