"""Full two-mode DOPO master equation, used as the exactness oracle.

The pump is written as ``a_p = displacement + delta a_p`` so that the large
coherent background does not have to be resolved by the Fock truncation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp

from . import fock
from .errors import SolverError, TruncationError
from .liouville import (EvolveConfig, SuperOperator, build_liouvillian,
                        commutator_super, parity_sector, steady_state, unvec, vec)
from .meanfield import classical_fixed_points, meanfield_dynamics, vacuum_state
from .params import DopoParams

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FullModel:
    params: DopoParams
    dim_p: int
    dim_s: int
    displacement: complex
    liouvillian: SuperOperator

    @property
    def dims(self):
        return (self.dim_p, self.dim_s)


def classical_displacement(params):
    """Default frame: classical pump amplitude (``eps_p/gamma_p`` below, ``gamma_s/chi`` above)."""
    sols = classical_fixed_points(params)
    return sols[-1].alpha_p.real if params.sigma > 1 else sols[0].alpha_p.real


def _mode_ops(dim_p, dim_s):
    a = fock.sparse_annihilation(dim_p)
    b = fock.sparse_annihilation(dim_s)
    ap = sp.kron(a, sp.identity(dim_s), format="csr")
    as_ = sp.kron(sp.identity(dim_p), b, format="csr")
    return ap, as_


def _full_terms(params, dim_p, dim_s, displacement):
    ap, as_ = _mode_ops(dim_p, dim_s)
    apd, asd = ap.T.conj().tocsr(), as_.T.conj().tocsr()
    as2, asd2 = (as_ @ as_).tocsr(), (asd @ asd).tocsr()
    alpha = complex(displacement)
    chi, eps = params.chi, params.eps_p
    # drive eps (ap^+ - ap) plus the terms produced by a_p -> a_p + alpha
    drive = (eps - params.gamma_p * alpha) * apd - (eps - params.gamma_p * np.conj(alpha)) * ap
    inter = 0.5 * chi * (ap @ asd2 - apd @ as2)
    shift = 0.5 * chi * (alpha * asd2 - np.conj(alpha) * as2)
    ham = [(1.0, drive), (1.0, inter), (1.0, shift)]
    diss = [(params.gamma_p, ap), (params.gamma_s, as_)]
    return ham, diss, (ap, as_, asd2, as2)


def build_full_model(params, dim_p, dim_s, displacement=None):
    """Liouvillian of the resonant DOPO in a frame displaced by ``displacement``.

    ``displacement=None`` selects the classical steady pump amplitude.
    """
    fock._check_dim(dim_p)
    fock._check_dim(dim_s)
    if displacement is None:
        displacement = classical_displacement(params)
    ham, diss, _ = _full_terms(params, dim_p, dim_s, displacement)
    L = build_liouvillian(ham, diss)
    return FullModel(params, int(dim_p), int(dim_s), complex(displacement), L)


def z2_sector(dim_p, dim_s):
    """Indices of ``vec(rho)`` with even signal-number difference ``n_s - n_s'``.

    The Liouvillian is invariant under ``a_s -> -a_s`` so this block is
    closed; the unique steady state lives in it.
    """
    return parity_sector(dim_p, dim_s)


def full_steady_state(model, v0=None, check_unique=False, use_symmetry=True):
    """Steady state of the full model; large problems are solved in the even Z2 block."""
    sector = z2_sector(model.dim_p, model.dim_s) if use_symmetry else None
    return steady_state(model.liouvillian, v0=v0, check_unique=check_unique, sector=sector)


def reduced_states(model, rho_joint):
    """``(rho_p, rho_s)`` in the model frame; add ``model.displacement`` to pump amplitudes."""
    rho_p = fock.partial_trace(rho_joint, model.dims, fock.PUMP)
    rho_s = fock.partial_trace(rho_joint, model.dims, fock.SIGNAL)
    return rho_p, rho_s


@dataclass(frozen=True)
class FullObservables:
    photon_number: float
    g2: float
    alpha_p: complex
    alpha_s: complex
    a_s3: complex
    n_p: float
    top_pop_p: float
    top_pop_s: float


def observables(model, rho_joint):
    """Signal photon number, g2, lab-frame pump amplitude and odd signal moments."""
    from .observables import g2 as _g2

    rho_p, rho_s = reduced_states(model, rho_joint)
    a_p = fock.annihilation(model.dim_p)
    a_s = fock.annihilation(model.dim_s)
    n_s = fock.expect(a_s.T @ a_s, rho_s).real
    ap_frame = fock.expect(a_p, rho_p)
    n_p = fock.expect(a_p.T @ a_p, rho_p).real - abs(ap_frame) ** 2
    return FullObservables(
        photon_number=float(n_s),
        g2=_g2(rho_s) if n_s > 1e-12 else float("nan"),
        alpha_p=ap_frame + model.displacement,
        alpha_s=fock.expect(a_s, rho_s),
        a_s3=fock.expect(a_s @ a_s @ a_s, rho_s),
        n_p=float(n_p),
        top_pop_p=float(np.real(np.diag(rho_p)[-2:]).sum()),
        top_pop_s=float(np.real(np.diag(rho_s)[-2:]).sum()),
    )


def full_steady(params, dim_p, dim_s, displacement=None, v0=None):
    """Convenience wrapper returning ``(model, rho_ss, observables)``."""
    model = build_full_model(params, dim_p, dim_s, displacement)
    rho = full_steady_state(model, v0=v0)
    return model, rho, observables(model, rho)


def auto_truncate(params, tol=1e-2, start=(4, 8), max_dims=(40, 400), growth=1.25,
                  displacement=None):
    """Smallest ``(dim_p, dim_s)`` whose observables are stable under 25 % growth.

    Starting from ``start`` each dimension is grown by ``growth`` until
    enlarging either one changes the signal photon number, the pump
    amplitude and g2 by less than ``tol`` (relative).  Raises
    :class:`TruncationError` naming the unconverged observable if
    ``max_dims`` is reached.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if params.eps_p == 0:
        return (2, 2)

    def obs(dp, ds):
        _, _, o = full_steady(params, dp, ds, displacement)
        return {"photon_number": o.photon_number, "alpha_p": abs(o.alpha_p), "g2": o.g2}

    def rel(x, y):
        return abs(x - y) / max(abs(y), 1e-12)

    def grow(d):
        return max(d + 1, int(np.ceil(d * growth)))

    dp, ds = start
    cache = {}

    def get(dp, ds):
        if (dp, ds) not in cache:
            cache[(dp, ds)] = obs(dp, ds)
        return cache[(dp, ds)]

    while True:
        base = get(dp, ds)
        moved = False
        for which in ("p", "s"):
            dp2, ds2 = (grow(dp), ds) if which == "p" else (dp, grow(ds))
            if dp2 > max_dims[0] or ds2 > max_dims[1]:
                # cannot certify this direction within the limits
                raise TruncationError(
                    f"truncation ({dp}, {ds}) cannot be verified within {max_dims}",
                    "photon_number")
            other = get(dp2, ds2)
            bad = [k for k in base if rel(base[k], other[k]) >= tol]
            if bad:
                dp, ds = dp2, ds2
                moved = True
                break
        if not moved:
            return dp, ds


# --- dynamics in a co-moving frame -----------------------------------------


def evolve_full(params, dim_p, dim_s, t_grid, cfg=None, frame="meanfield"):
    """Transient of the full master equation from the two-mode vacuum.

    The pump is displaced by a time-dependent real amplitude ``beta(t)``
    (the mean-field pump trajectory by default, ``frame="empty"`` for the
    undepleted ``eps_p (1 - exp(-gamma_p t)) / gamma_p``).  This keeps the
    pump near the frame vacuum at all times, so small ``dim_p`` suffice.
    The exact generator in that frame is::

        L(t) = L0 + f(t) [a_p^+ - a_p, .] + beta(t) chi/2 [a_s^+2 - a_s^2, .]

    with ``f = eps_p - gamma_p beta - dbeta/dt``.

    Returns ``(states, betas)``: joint density matrices in the frame and the
    displacement at each output time.
    """
    cfg = cfg or EvolveConfig()
    t_grid = np.asarray(t_grid, dtype=float)
    if frame == "meanfield":
        _, mf = meanfield_dynamics(params, vacuum_state(), t_grid, cfg, dense=True)

        def beta(t):
            return mf.sol(t)[0].real

        def fdrive(t):
            # eps - gamma_p beta - dbeta/dt = chi/2 m_s(t)
            return 0.5 * params.chi * mf.sol(t)[2].real
    elif frame == "empty":
        def beta(t):
            return params.eps_p / params.gamma_p * (1 - np.exp(-params.gamma_p * t))

        def fdrive(t):
            return 0.0
    else:
        raise ValueError(f"unknown frame {frame!r}")

    free = DopoParams(params.gamma_s, params.gamma_p, params.chi, 0.0)
    ham, diss, (ap, as_, asd2, as2) = _full_terms(free, dim_p, dim_s, 0.0)
    L0 = build_liouvillian(ham, diss).matrix
    Gp = commutator_super(ap.T.conj() - ap)
    Gs = commutator_super(0.5 * params.chi * (asd2 - as2))
    dim = dim_p * dim_s
    rho0 = np.zeros((dim, dim), dtype=complex)
    rho0[0, 0] = 1.0

    def rhs(t, y):
        return L0 @ y + fdrive(t) * (Gp @ y) + beta(t) * (Gs @ y)

    sol = solve_ivp(rhs, (t_grid[0], t_grid[-1]), vec(rho0), t_eval=t_grid,
                    rtol=cfg.rtol, atol=cfg.atol, method=cfg.method)
    if not sol.success:
        raise SolverError(f"full master-equation integration failed: {sol.message}")
    states = [fock.hermitize(unvec(sol.y[:, i], dim)) for i in range(sol.y.shape[1])]
    betas = np.array([beta(t) for t in t_grid])
    return states, betas
