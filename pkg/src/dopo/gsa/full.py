"""Gaussian state approximation of the two-mode master equation.

Unknowns are the raw moments ``<a_p>``, ``<a_s>``, ``<a_p^2>``, ``<a_s^2>``,
``<a_p a_s>``, ``<a_p a_s^+>`` (complex) and ``<a_p^+ a_p>``,
``<a_s^+ a_s>`` (real).  Their exact equations of motion contain third
order moments, which are evaluated on the Gaussian state with the same
first and second moments.
"""

from __future__ import annotations

import logging

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import root

from ..errors import SolverError
from ..liouville import EvolveConfig
from ..meanfield import ABOVE_MINUS, ABOVE_PLUS, BELOW, classical_fixed_points, meanfield_steady
from .branch import AT_MINUS, AT_PLUS, BT, GSA_FULL, GaussianBranch
from .wick import GaussianModes, expect

log = logging.getLogger(__name__)

P, S = "p", "s"
ap, apd, as_, asd = (P, False), (P, True), (S, False), (S, True)

# complex slots, then real slots
_CPLX = ("alpha_p", "alpha_s", "S_p", "S_s", "K1", "K2")
_REAL = ("N_p", "N_s")
_ODD = ("alpha_s", "K1", "K2")


def _state(v):
    """GaussianModes from the raw moment dict ``v``."""
    a_p, a_s = v["alpha_p"], v["alpha_s"]
    return GaussianModes(
        {P: a_p, S: a_s},
        {(P, P): v["N_p"] - abs(a_p) ** 2, (S, S): v["N_s"] - abs(a_s) ** 2,
         (S, P): v["K2"] - a_p * np.conj(a_s)},
        {(P, P): v["S_p"] - a_p ** 2, (S, S): v["S_s"] - a_s ** 2, (P, S): v["K1"] - a_p * a_s},
    )


def raw_rhs(params, v):
    """Time derivative of the raw moment dict under Gaussian closure."""
    st = _state(v)
    gp, gs, chi, eps = params.gamma_p, params.gamma_s, params.chi, params.eps_p

    def E(*ops):
        return expect(list(ops), st)

    d = {}
    d["alpha_p"] = eps - gp * v["alpha_p"] - 0.5 * chi * v["S_s"]
    d["alpha_s"] = -gs * v["alpha_s"] + chi * v["K2"]
    ad2_ap = E(asd, asd, ap)
    apd_a2 = E(apd, as_, as_)
    d["N_p"] = (eps * 2 * np.real(v["alpha_p"]) - 0.5 * chi * (ad2_ap + apd_a2)
                - 2 * gp * v["N_p"])
    d["S_p"] = 2 * eps * v["alpha_p"] - chi * E(ap, as_, as_) - 2 * gp * v["S_p"]
    d["N_s"] = chi * (apd_a2 + ad2_ap) - 2 * gs * v["N_s"]
    d["S_s"] = chi * (2 * E(ap, asd, as_) + v["alpha_p"]) - 2 * gs * v["S_s"]
    d["K1"] = (eps * v["alpha_s"] - 0.5 * chi * E(as_, as_, as_) + chi * E(ap, ap, asd)
               - (gp + gs) * v["K1"])
    d["K2"] = (eps * np.conj(v["alpha_s"]) - 0.5 * chi * E(asd, as_, as_)
               + chi * E(apd, ap, as_) - (gp + gs) * v["K2"])
    for k in _REAL:
        d[k] = float(np.real(d[k]))
    return d


def _to_vec(v, free):
    out = []
    for k in _CPLX:
        if k in free:
            out += [np.real(v[k]), np.imag(v[k])]
    out += [np.real(v[k]) for k in _REAL if k in free]
    return np.array(out, dtype=float)


def _from_vec(x, free):
    v = {k: 0j for k in _CPLX}
    v.update({k: 0.0 for k in _REAL})
    i = 0
    for k in _CPLX:
        if k in free:
            v[k] = x[i] + 1j * x[i + 1]
            i += 2
    for k in _REAL:
        if k in free:
            v[k] = float(x[i])
            i += 1
    return v


def raw_from_moments(alpha_p, alpha_s, n_p=0.0, m_p=0j, n_s=0.0, m_s=0j):
    return {"alpha_p": complex(alpha_p), "alpha_s": complex(alpha_s),
            "S_p": m_p + alpha_p ** 2, "S_s": m_s + alpha_s ** 2,
            "K1": alpha_p * alpha_s, "K2": alpha_p * np.conj(alpha_s),
            "N_p": float(n_p + abs(alpha_p) ** 2), "N_s": float(n_s + abs(alpha_s) ** 2)}


def _branch_from_raw(v, label, converged, residual, sigma):
    a_p, a_s = v["alpha_p"], v["alpha_s"]
    aux = {"cross_m": v["K1"] - a_p * a_s, "cross_n": v["K2"] - a_p * np.conj(a_s)}
    return GaussianBranch(GSA_FULL, label, a_s, a_p, float(v["N_s"] - abs(a_s) ** 2),
                          float(v["N_p"] - abs(a_p) ** 2), v["S_s"] - a_s ** 2,
                          v["S_p"] - a_p ** 2, aux, converged, residual, sigma=sigma)


def solve_branch(params, seed, symmetric, tol=1e-11):
    """Newton-type solve of the steady GSA equations from ``seed`` (raw dict).

    ``symmetric`` pins the Z2-odd moments to zero (BT branch).
    Returns ``(raw, residual)`` or raises :class:`SolverError`.
    """
    free = [k for k in _CPLX + _REAL if not (symmetric and k in _ODD)]
    scale = max(1.0, abs(seed["N_s"]), abs(seed["alpha_p"]) ** 2)

    def f(x):
        return _to_vec(raw_rhs(params, _from_vec(x, free)), free) / scale

    sol = root(f, _to_vec(seed, free), method="hybr", options={"xtol": 1e-14, "maxfev": 4000})
    res = float(np.abs(f(sol.x)).max())
    if not np.isfinite(res) or res > tol:
        raise SolverError(f"GSA steady solve did not converge (residual {res:.3g})", residual=res)
    return _from_vec(sol.x, free), res


def gsa_full(params, tol=1e-11):
    """All physical steady branches of the Gaussian approximation of the full model.

    Seeds: classical BT, mean-field and the classical AT pair.  Branches
    that fail to converge or violate Gaussian physicality are logged and
    dropped.
    """
    sigma = params.sigma
    out = []
    cl = {c.branch: c for c in classical_fixed_points(params)}
    mf = meanfield_steady(params)
    bt_seeds = [raw_from_moments(cl[BELOW].alpha_p, 0.0),
                raw_from_moments(mf.alpha_p, 0.0, n_s=mf.n_s, m_s=mf.m_s)]
    for seed in bt_seeds:
        try:
            v, res = solve_branch(params, seed, symmetric=True, tol=tol)
        except SolverError as exc:
            log.info("BT seed failed: %s", exc)
            continue
        br = _branch_from_raw(v, BT, True, res, sigma)
        if br.is_physical():
            out.append(br)
            break
        log.info("BT solution rejected as unphysical")
    if ABOVE_PLUS in cl:
        plus = _solve_at(params, cl[ABOVE_PLUS], tol)
        if plus is not None:
            out += [plus, plus.mirrored()]
    return out


def _solve_at(params, cls, tol, seed=None):
    seeds = [seed] if seed is not None else []
    seeds.append(raw_from_moments(cls.alpha_p, cls.alpha_s))
    for sd in seeds:
        try:
            v, res = solve_branch(params, sd, symmetric=False, tol=tol)
        except SolverError as exc:
            log.info("AT seed failed: %s", exc)
            continue
        if abs(v["alpha_s"]) < 1e-6 * max(1.0, abs(cls.alpha_s)):
            continue
        if np.real(v["alpha_s"]) < 0:
            v = {**v, "alpha_s": -v["alpha_s"], "K1": -v["K1"], "K2": -v["K2"]}
        br = _branch_from_raw(v, AT_PLUS, True, res, params.sigma)
        if br.is_physical():
            return br
    return None


def gsa_full_dynamics(params, t_grid, cfg=None, initial=None):
    """Integrate the closed Gaussian equations from the two-mode vacuum."""
    cfg = cfg or EvolveConfig()
    v0 = initial or raw_from_moments(0.0, 0.0)
    free = list(_CPLX + _REAL)

    def rhs(t, x):
        return _to_vec(raw_rhs(params, _from_vec(x, free)), free)

    t_grid = np.asarray(t_grid, dtype=float)
    sol = solve_ivp(rhs, (t_grid[0], t_grid[-1]), _to_vec(v0, free), t_eval=t_grid,
                    rtol=cfg.rtol, atol=cfg.atol, method=cfg.method)
    if not sol.success:
        raise SolverError(f"GSA integration failed: {sol.message}")
    return [_branch_from_raw(_from_vec(sol.y[:, i], free), BT, True, 0.0, params.sigma)
            for i in range(sol.y.shape[1])]
