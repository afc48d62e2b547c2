"""Truncated Fock-space algebra for one or two bosonic modes.

Operators are plain numpy arrays (dense) or scipy CSR matrices (sparse).
Two-mode composites are always ordered pump (x) signal, i.e. the joint
basis index is ``i_p * dim_s + i_s``.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from .errors import DimensionError

PUMP = "pump"
SIGNAL = "signal"


def _check_dim(dim):
    if int(dim) != dim or dim < 2:
        raise DimensionError(f"Fock dimension must be an integer >= 2, got {dim!r}")
    return int(dim)


def annihilation(dim):
    """Truncated annihilation operator with ``<m|a|n> = sqrt(n) delta_{m,n-1}``."""
    dim = _check_dim(dim)
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)


def creation(dim):
    return annihilation(dim).T.copy()


def number(dim):
    dim = _check_dim(dim)
    return np.diag(np.arange(dim, dtype=float))


def sparse_annihilation(dim):
    dim = _check_dim(dim)
    return sp.diags(np.sqrt(np.arange(1, dim, dtype=float)), 1, format="csr")


class Ladder:
    """Sparse ladder operators of one mode, cached for repeated products.

    Attributes ``a``, ``ad``, ``a2``, ``ad2`` and ``n`` are CSR matrices.
    """

    def __init__(self, dim):
        self.dim = _check_dim(dim)
        self.a = sparse_annihilation(dim)
        self.ad = self.a.T.tocsr()
        self.a2 = (self.a @ self.a).tocsr()
        self.ad2 = self.a2.T.tocsr()
        self.n = sp.diags(np.arange(self.dim, dtype=float), 0, format="csr")
        self.eye = sp.identity(self.dim, format="csr")

    def expect(self, op, rho):
        """``Tr(op @ rho)`` without forming the product."""
        return (op.multiply(rho.T)).sum()


def dissipator_apply(b, rho):
    """Lindblad dissipator ``D_b(rho) = 2 b rho b^+ - b^+ b rho - rho b^+ b``."""
    b = np.asarray(b.toarray() if sp.issparse(b) else b)
    rho = np.asarray(rho)
    if b.shape != rho.shape or b.shape[0] != b.shape[1]:
        raise DimensionError(f"dimension mismatch: operator {b.shape}, state {rho.shape}")
    bd = b.conj().T
    bdb = bd @ b
    return 2 * b @ rho @ bd - bdb @ rho - rho @ bdb


def commutator(a, b):
    return a @ b - b @ a


def tensor(op_p, op_s):
    """Pump (x) signal Kronecker product; sparse if either factor is sparse."""
    if sp.issparse(op_p) or sp.issparse(op_s):
        return sp.kron(op_p, op_s, format="csr")
    return np.kron(op_p, op_s)


def partial_trace(rho, dims, keep):
    """Reduced state of a two-mode density matrix.

    Parameters
    ----------
    rho : ndarray, shape (dp*ds, dp*ds)
    dims : (dp, ds)
        Pump and signal truncations; the composite is ordered pump (x) signal.
    keep : {"pump", "signal"}
    """
    dp, ds = (int(d) for d in dims)
    rho = np.asarray(rho)
    if rho.shape != (dp * ds, dp * ds):
        raise DimensionError(
            f"state of shape {rho.shape} does not factorize as {dp} x {ds}"
        )
    r = rho.reshape(dp, ds, dp, ds)
    if keep == PUMP:
        return np.einsum("ikjk->ij", r)
    if keep == SIGNAL:
        return np.einsum("kikj->ij", r)
    raise ValueError(f"keep must be 'pump' or 'signal', got {keep!r}")


# --- states -----------------------------------------------------------------


def fock_dm(dim, n):
    rho = np.zeros((dim, dim), dtype=complex)
    rho[n, n] = 1.0
    return rho


def coherent_ket(dim, alpha):
    """Coherent state amplitudes computed from the Poisson series (not truncated expm)."""
    n = np.arange(dim)
    logfact = np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, dim)))))
    if alpha == 0:
        psi = np.zeros(dim, dtype=complex)
        psi[0] = 1.0
        return psi
    mag = np.exp(-abs(alpha) ** 2 / 2 + n * np.log(abs(alpha)) - 0.5 * logfact)
    return mag * np.exp(1j * np.angle(alpha) * n)


def coherent_dm(dim, alpha):
    psi = coherent_ket(dim, alpha)
    return np.outer(psi, psi.conj())


def thermal_dm(dim, nbar):
    if nbar == 0:
        return fock_dm(dim, 0)
    q = nbar / (1.0 + nbar)
    p = (1 - q) * q ** np.arange(dim)
    return np.diag(p).astype(complex)


def gaussian_dm(dim, alpha=0.0, n=0.0, m=0.0, work_dim=None):
    """Single-mode Gaussian state with ``<a> = alpha``, ``<da^+ da> = n``, ``<da^2> = m``.

    Built as a displaced, squeezed thermal state in a larger working space
    (``work_dim``, default ``4*dim + 40``) and then cut down to ``dim``; the
    result is renormalized so truncation only affects the tails.
    """
    if n * (n + 1) < abs(m) ** 2 - 1e-12:
        raise ValueError("moments violate n(n+1) >= |m|^2")
    wd = work_dim or 4 * dim + 40
    a = annihilation(wd).astype(complex)
    ad = a.conj().T
    # squeezed thermal: n = (2N+1) sinh^2 r + N ... solve via symplectic eigenvalue
    nu = np.sqrt(max((n + 0.5) ** 2 - abs(m) ** 2, 0.25))
    nth = nu - 0.5
    if abs(m) > 0:
        r = 0.5 * np.arccosh((n + 0.5) / nu)
        phi = np.angle(m)
        xi = r * np.exp(1j * phi)
        # S(xi) = exp((xi* a^2 - xi a^+2)/2) gives <a^2> = -e^{i phi} ...; flip sign
        sq = la.expm(0.5 * (-np.conj(xi) * a @ a + xi * ad @ ad))
    else:
        sq = np.eye(wd)
    rho = sq @ thermal_dm(wd, nth) @ sq.conj().T
    if alpha != 0:
        disp = la.expm(alpha * ad - np.conj(alpha) * a)
        rho = disp @ rho @ disp.conj().T
    rho = rho[:dim, :dim]
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def hermitize(rho):
    return 0.5 * (rho + rho.conj().T)


def expect(op, rho):
    if sp.issparse(op):
        return op.multiply(np.asarray(rho).T).sum()
    return np.einsum("ij,ji->", op, rho)


def trace_distance(rho, sigma):
    ev = np.linalg.eigvalsh(hermitize(np.asarray(rho) - np.asarray(sigma)))
    return 0.5 * np.abs(ev).sum()


def fidelity(rho, sigma):
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2``."""
    sr = la.sqrtm(hermitize(rho))
    val = np.trace(la.sqrtm(sr @ sigma @ sr)).real
    return val ** 2
