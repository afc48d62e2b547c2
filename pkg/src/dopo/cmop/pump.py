"""Pump side of the c-MoP equations.

Two interchangeable representations are provided:

* the *moment backend* tracks ``<a_p>`` (frame), ``n_p = <da^+ da>``,
  ``m_p = <da^2>`` and five traces ``Tr(O h_{p,n})`` per eigen-channel
  ``n``, with ``O`` in ``(a, a^+, a^2, a^+ a, a^+2)``;
* the *matrix backend* propagates ``rho_p`` and the three ``h_{p,n}``
  explicitly in a truncated Fock space that co-moves with ``<a_p>``.

Only ``<a_p>``, ``n_p``, ``m_p`` and the first two traces feed back into the
signal equation, and their equations close exactly.  The remaining three
traces involve third-order pump moments and are closed by Gaussian
factorization; they are diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import fock
from ..errors import TruncationError

AUX_LABELS = ("a", "ad", "a2", "ada", "ad2")


@dataclass(frozen=True)
class PumpMoments:
    """Pump state in the displaced frame.

    ``aux[n, k]`` is ``Tr(O_k h_{p,n})`` with ``O_k`` as in ``AUX_LABELS``.
    """

    alpha_p: complex = 0j
    n_p: float = 0.0
    m_p: complex = 0j
    aux: np.ndarray = field(default_factory=lambda: np.zeros((3, 5), dtype=complex))

    def correlators(self):
        return PumpCorrelators.from_moments(self.n_p, self.m_p)

    def is_physical(self, tol=1e-8):
        return self.n_p >= -1e-10 and self.n_p * (self.n_p + 1) >= abs(self.m_p) ** 2 - tol


@dataclass(frozen=True)
class PumpCorrelators:
    """Equal-time pump correlators; all decay as ``exp(-gamma_p tau)``."""

    dp_plus: complex
    dtp_plus: complex
    dp_minus: complex
    dtp_minus: complex

    @classmethod
    def from_moments(cls, n_p, m_p):
        mc = np.conj(m_p)
        return cls(mc, mc, complex(n_p), complex(1 + n_p))


def _source(vals, d):
    """``Tr(O K rho)`` from ``(<O da>, <da O>, <O da^+>, <da^+ O>)`` and ``d = (d+, d~+, d-, d~-)``."""
    return vals[0] * d[0] - vals[1] * d[1] - vals[2] * d[2] + vals[3] * d[3]


def moment_rhs(params, alpha_tilde, lambdas, coeffs, s, A, n, m, T, born=True):
    """Time derivatives of ``(A, n, m, T)`` for the moment backend.

    Parameters
    ----------
    coeffs : ndarray, shape (4, 3)
        Signal correlator coefficients ``(d+, d~+, d-, d~-)`` per channel.
    s : complex
        ``<a_s^2>``.
    T : ndarray, shape (3, 5)
    """
    gp, chi = params.gamma_p, params.chi
    c = 0.25 * chi ** 2 if born else 0.0
    ep = params.eps_p - gp * alpha_tilde
    epc = np.conj(ep)
    Ac, mc = np.conj(A), np.conj(m)
    dA = ep - gp * A - 0.5 * chi * s
    dn = -2 * gp * n - 2 * c * np.real(T[:, 0].sum())
    dm = -2 * gp * m - 2 * c * np.conj(T[:, 1].sum())
    vals = (
        (m, m, 1 + n, n),
        (n, 1 + n, mc, mc),
        (2 * A * m, 2 * A * m, 2 * A * (1 + n), 2 * A * n),
        (Ac * m + A * n, Ac * m + A * (1 + n), Ac * (1 + n) + A * mc, Ac * n + A * mc),
        (2 * Ac * n, 2 * Ac * (1 + n), 2 * Ac * mc, 2 * Ac * mc),
    )
    dT = np.empty((3, 5), dtype=complex)
    for k in range(3):
        d = coeffs[:, k]
        lam = lambdas[k]
        src = [_source(v, d) for v in vals]
        dT[k, 0] = (lam - gp) * T[k, 0] + src[0]
        dT[k, 1] = (lam - gp) * T[k, 1] + src[1]
        dT[k, 2] = (lam - 2 * gp) * T[k, 2] + 2 * ep * T[k, 0] + src[2]
        dT[k, 3] = (lam - 2 * gp) * T[k, 3] + ep * T[k, 1] + epc * T[k, 0] + src[3]
        dT[k, 4] = (lam - 2 * gp) * T[k, 4] + 2 * epc * T[k, 1] + src[4]
    return dA, dn, dm, dT


def moment_steady(params, alpha_tilde, lambdas, coeffs, s, n, m, born=True):
    """Steady pump moments for fixed signal input and trial ``(n, m)``.

    Returns ``(A, n_new, m_new, T)``; at self-consistency ``n_new = n`` and
    ``m_new = m``.
    """
    gp, chi = params.gamma_p, params.chi
    c = 0.25 * chi ** 2 if born else 0.0
    ep = params.eps_p - gp * alpha_tilde
    A = (ep - 0.5 * chi * s) / gp
    zero = np.zeros((3, 5), dtype=complex)
    # linear in T: solve the triangular system column by column
    _, _, _, src = moment_rhs(params, alpha_tilde, lambdas, coeffs, s, A, n, m, zero, born)
    T = np.empty((3, 5), dtype=complex)
    epc = np.conj(ep)
    for k in range(3):
        lam = lambdas[k]
        T[k, 0] = -src[k, 0] / (lam - gp)
        T[k, 1] = -src[k, 1] / (lam - gp)
        T[k, 2] = -(src[k, 2] + 2 * ep * T[k, 0]) / (lam - 2 * gp)
        T[k, 3] = -(src[k, 3] + ep * T[k, 1] + epc * T[k, 0]) / (lam - 2 * gp)
        T[k, 4] = -(src[k, 4] + 2 * epc * T[k, 1]) / (lam - 2 * gp)
    n_new = -c * np.real(T[:, 0].sum()) / gp
    m_new = -c * np.conj(T[:, 1].sum()) / gp
    return A, n_new, m_new, T


class MatrixPump:
    """Explicit ``rho_p`` and ``h_{p,n}`` in a Fock space displaced by ``beta(t)``.

    The displacement obeys ``dbeta/dt = eps' - chi/2 <a_s^2> - gamma_p beta``,
    which removes the coherent part from ``rho_p`` so that a few pump levels
    suffice.  In that frame ``h_{p,n}`` sees the residual drive
    ``chi/2 (<a_s^2> a^+ - <a_s^2>^* a)``.
    """

    def __init__(self, params, alpha_tilde, dim_p, born=True):
        if dim_p < 4:
            raise ValueError("matrix pump backend needs dim_p >= 4")
        self.params = params
        self.alpha_tilde = complex(alpha_tilde)
        self.dim = int(dim_p)
        self.lad = fock.Ladder(dim_p)
        self.c = 0.25 * params.chi ** 2 if born else 0.0
        self.size = 1 + 4 * self.dim ** 2

    def initial(self):
        rho = fock.fock_dm(self.dim, 0)
        out = np.zeros(self.size, dtype=complex)
        out[0] = -self.alpha_tilde
        out[1:1 + self.dim ** 2] = rho.ravel()
        return out

    def unpack(self, y):
        d2 = self.dim ** 2
        beta = y[0]
        rho = y[1:1 + d2].reshape(self.dim, self.dim)
        h = y[1 + d2:].reshape(3, self.dim, self.dim)
        return beta, rho, h

    def _diss(self, x):
        a, ad, n = self.lad.a, self.lad.ad, self.lad.n
        return 2 * (a @ (ad.T @ x.T).T) - n @ x - (n.T @ x.T).T

    def rhs(self, y, s, lambdas, coeffs):
        gp, chi = self.params.gamma_p, self.params.chi
        lad = self.lad
        a, ad = lad.a, lad.ad
        beta, rho, h = self.unpack(y)
        ep = self.params.eps_p - gp * self.alpha_tilde
        dbeta = ep - 0.5 * chi * s - gp * beta
        H = h.sum(axis=0)
        X = a @ H - (a.T @ H.T).T
        drho = gp * self._diss(rho) + self.c * (X + X.conj().T)
        amean = lad.expect(a, rho)
        da = a.toarray() - amean * np.eye(self.dim)
        dad = da.conj().T
        drive = 0.5 * chi * (s * ad - np.conj(s) * a)
        dh = np.empty_like(h)
        for k in range(3):
            d = coeffs[:, k]
            hk = h[k]
            K = d[0] * da @ rho - d[1] * rho @ da - d[2] * dad @ rho + d[3] * rho @ dad
            comm = drive @ hk - (drive.T @ hk.T).T
            dh[k] = lambdas[k] * hk + comm + gp * self._diss(hk) + K
        return np.concatenate(([dbeta], drho.ravel(), dh.ravel()))

    def moments(self, y, check=True, tol=1e-8):
        """Convert to the moment-backend variables ``(A, n, m, T)``."""
        beta, rho, h = self.unpack(y)
        lad = self.lad
        if check:
            top = float(np.real(rho[-1, -1]))
            if top > tol:
                raise TruncationError(f"top pump level population {top:.3g} exceeds {tol:g}",
                                      "pump")
        am = lad.expect(lad.a, rho)
        A = beta + am
        n = float(np.real(lad.expect(lad.n, rho)) - abs(am) ** 2)
        m = lad.expect(lad.a2, rho) - am ** 2
        T = np.empty((3, 5), dtype=complex)
        for k in range(3):
            t1 = lad.expect(lad.a, h[k])
            t2 = lad.expect(lad.ad, h[k])
            T[k, 0] = t1
            T[k, 1] = t2
            T[k, 2] = lad.expect(lad.a2, h[k]) + 2 * beta * t1
            T[k, 3] = lad.expect(lad.n, h[k]) + np.conj(beta) * t1 + beta * t2
            T[k, 4] = lad.expect(lad.ad2, h[k]) + 2 * np.conj(beta) * t2
        return A, n, m, T
