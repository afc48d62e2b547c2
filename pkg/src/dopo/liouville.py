"""Superoperators on column-stacked density matrices, steady states and time evolution.

Convention: ``vec(rho) = rho.flatten(order="F")`` so that
``vec(A rho B) = (B.T kron A) vec(rho)``.  Hamiltonian terms are given the
way the DOPO master equation is usually printed, as anti-Hermitian
generators ``G`` entering ``[G, rho]``; ``-i[H, rho]`` corresponds to
``G = -i H``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp

from .errors import DegenerateSteadyStateError, DimensionError, RateError, SolverError
from .fock import hermitize

log = logging.getLogger(__name__)

DENSE_LIMIT = 4096


def vec(rho):
    return np.asarray(rho).flatten(order="F")


def unvec(v, dim=None):
    dim = dim or int(round(np.sqrt(v.size)))
    return np.asarray(v).reshape((dim, dim), order="F")


@dataclass(frozen=True)
class EvolveConfig:
    rtol: float = 1e-8
    atol: float = 1e-10
    steady_residual: float = 1e-9
    max_time: float = 1e4
    method: str = "DOP853"

    def __post_init__(self):
        for name in ("rtol", "atol", "steady_residual", "max_time"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")


@dataclass(frozen=True, eq=False)
class SuperOperator:
    """Sparse matrix acting on ``vec(rho)`` for a ``dim x dim`` operator space."""

    dim: int
    matrix: sp.csr_matrix

    def __matmul__(self, other):
        if isinstance(other, SuperOperator):
            return SuperOperator(self.dim, (self.matrix @ other.matrix).tocsr())
        return self.matrix @ other

    def __add__(self, other):
        return SuperOperator(self.dim, (self.matrix + other.matrix).tocsr())

    def __mul__(self, c):
        return SuperOperator(self.dim, (c * self.matrix).tocsr())

    __rmul__ = __mul__

    def apply(self, rho):
        return unvec(self.matrix @ vec(rho), self.dim)

    def norm(self):
        return spla.norm(self.matrix, 1) if self.matrix.nnz else 0.0

    def trace_leak(self):
        """``||vec(I)^T L||`` relative to ``||L||``; zero for trace-preserving maps."""
        ident = vec(np.eye(self.dim))
        leak = np.abs(ident @ self.matrix).max() if self.matrix.nnz else 0.0
        nrm = self.norm()
        return leak / nrm if nrm else 0.0


def _sparse(op):
    return sp.csr_matrix(op, dtype=complex)


def left(op):
    op = _sparse(op)
    return sp.kron(sp.identity(op.shape[0]), op, format="csr")


def right(op):
    op = _sparse(op)
    return sp.kron(op.T, sp.identity(op.shape[0]), format="csr")


def commutator_super(gen):
    """Superoperator of ``rho -> [gen, rho]``."""
    return (left(gen) - right(gen)).tocsr()


def dissipator_super(b):
    b = _sparse(b)
    bd = b.conj().T
    bdb = (bd @ b).tocsr()
    return (2 * sp.kron(b.conj(), b) - left(bdb) - right(bdb)).tocsr()


def build_liouvillian(hamiltonian_terms=(), dissipators=()):
    """Assemble ``rho -> sum_k c_k [G_k, rho] + sum_j g_j D_{b_j}(rho)``.

    Parameters
    ----------
    hamiltonian_terms : iterable of (complex, operator)
        Anti-Hermitian generator pieces, e.g. ``(eps, a.T - a)`` for a
        resonant drive ``eps (a^+ - a)``.
    dissipators : iterable of (float, operator)
        Rates ``g_j >= 0`` and jump operators ``b_j``.
    """
    ops = [op for _, op in hamiltonian_terms] + [op for _, op in dissipators]
    if not ops:
        raise DimensionError("at least one term is required")
    shapes = {op.shape for op in ops}
    if len(shapes) != 1 or next(iter(shapes))[0] != next(iter(shapes))[1]:
        raise DimensionError(f"operators have inconsistent shapes {sorted(shapes)}")
    dim = ops[0].shape[0]
    mat = sp.csr_matrix((dim * dim, dim * dim), dtype=complex)
    for coef, op in hamiltonian_terms:
        if coef != 0:
            mat = mat + coef * commutator_super(op)
    for rate, op in dissipators:
        if rate < 0:
            raise RateError(f"negative dissipation rate {rate}")
        if rate > 0:
            mat = mat + rate * dissipator_super(op)
    mat.sum_duplicates()
    mat.eliminate_zeros()
    return SuperOperator(dim, mat.tocsr())


def parity_sector(dim_p, dim_s):
    """Indices of column-major ``vec(rho)`` on ``C^dim_p (x) C^dim_s`` whose
    signal-number difference ``n_s - n_s'`` is even."""
    dim = dim_p * dim_s
    ns = np.arange(dim) % dim_s
    even = ((ns[:, None] - ns[None, :]) % 2 == 0).flatten(order="F")
    return np.nonzero(even)[0]


def _normalize(v, dim):
    rho = unvec(v, dim)
    tr = np.trace(rho)
    if abs(tr) < 1e-300:
        raise SolverError("null vector has zero trace")
    return hermitize(rho / tr)


def steady_state(L, shift=None, check_unique=True, v0=None, maxiter=8, sector=None,
                 method="auto"):
    """Trace-normalized null vector of ``L``.

    Small problems (``dim^2 <= 4096``) use a dense eigendecomposition.
    Larger ones replace the ``rho_00`` equation by the trace condition and
    solve the resulting linear system, either with GMRES preconditioned by
    an incomplete LU (``method="gmres"``, the default for large problems) or
    by inverse iteration on a full sparse LU of ``L - shift``
    (``method="lu"``).  With ``check_unique`` the second-smallest eigenvalue
    is also computed and a :class:`DegenerateSteadyStateError` is raised if
    it is within ``1e-10`` of zero.

    Parameters
    ----------
    sector : array of int, optional
        Indices of ``vec(rho)`` spanning an invariant subspace that contains
        the steady state (e.g. a parity sector).  Must include index 0.
    v0 : array, optional
        Starting vector, e.g. the neighbouring point of a sweep.
    """
    n = L.matrix.shape[0]
    scale = max(L.norm(), 1e-300)
    if method == "auto":
        method = "dense" if n <= DENSE_LIMIT else "gmres"
    if method == "dense":
        w, vr = la.eig(L.matrix.toarray())
        order = np.argsort(np.abs(w))
        if check_unique and n > 1 and abs(w[order[1]]) < 1e-10 * max(1.0, scale):
            raise DegenerateSteadyStateError(
                f"two eigenvalues near zero: {w[order[0]]:.3g}, {w[order[1]]:.3g}"
            )
        rho = _normalize(vr[:, order[0]], L.dim)
        _check_residual(L, rho, scale)
        return rho

    if method == "gmres":
        v = _steady_gmres(L, sector, v0)
    elif method == "lu":
        v = _steady_inverse_iteration(L, shift, v0, maxiter, scale)
    else:
        raise ValueError(f"unknown method {method!r}")
    rho = _normalize(v, L.dim)
    if check_unique:
        gap = spectral_gap(L, shift=-1e-9 * scale if shift is None else shift)
        if gap < 1e-10 * max(1.0, scale):
            raise DegenerateSteadyStateError(f"second eigenvalue {gap:.3g} is near zero")
    _check_residual(L, rho, scale)
    return rho


def _steady_gmres(L, sector, v0, drop_tol=1e-2, fill_factor=5, rtol=1e-12):
    n = L.matrix.shape[0]
    idx = np.arange(n) if sector is None else np.asarray(sector)
    if idx[0] != 0:
        raise ValueError("sector must start with the rho_00 index 0")
    A = L.matrix[idx][:, idx].tolil()
    A[0, :] = vec(np.eye(L.dim))[idx]
    A = A.tocsc()
    b = np.zeros(len(idx), dtype=complex)
    b[0] = 1.0
    x0 = None if v0 is None else np.asarray(v0, dtype=complex).ravel()[idx]
    try:
        ilu = spla.spilu(A, drop_tol=drop_tol, fill_factor=fill_factor)
    except RuntimeError as exc:
        raise SolverError(f"incomplete factorization failed: {exc}") from exc
    M = spla.LinearOperator(A.shape, ilu.solve, dtype=complex)
    x, info = spla.gmres(A, b, x0=x0, M=M, rtol=rtol, atol=0.0, restart=200, maxiter=50)
    if info != 0:
        res = np.linalg.norm(A @ x - b)
        raise SolverError(f"GMRES did not converge (info={info})", residual=res)
    v = np.zeros(n, dtype=complex)
    v[idx] = x
    return v


def _steady_inverse_iteration(L, shift, v0, maxiter, scale):
    n = L.matrix.shape[0]
    shift = -1e-9 * scale if shift is None else shift
    A = (L.matrix - shift * sp.identity(n, format="csr")).tocsc()
    try:
        lu = spla.splu(A, permc_spec="COLAMD")
    except RuntimeError as exc:
        raise SolverError(f"sparse factorization failed: {exc}") from exc
    if v0 is None:
        v = vec(np.eye(L.dim)) / L.dim
    else:
        v = np.asarray(v0, dtype=complex).ravel()
    v = v.astype(complex)
    for _ in range(maxiter):
        v_new = lu.solve(v)
        v_new /= np.linalg.norm(v_new)
        v = v_new
        if np.linalg.norm(L.matrix @ v) <= 1e-12 * scale:
            break
    return v


def _check_residual(L, rho, scale):
    res = np.linalg.norm(L.matrix @ vec(rho), 1)
    if res > 1e-8 * scale:
        raise SolverError(f"steady-state residual {res:.3g} exceeds tolerance", residual=res)


def spectral_gap(L, lu=None, shift=0.0, k=2):
    """Magnitude of the second-smallest eigenvalue of ``L`` (shift-invert Arnoldi)."""
    n = L.matrix.shape[0]
    if n <= DENSE_LIMIT:
        w = la.eigvals(L.matrix.toarray())
        return float(np.sort(np.abs(w))[1])
    if lu is None:
        lu = spla.splu((L.matrix - shift * sp.identity(n, format="csc")).tocsc())
    op = spla.LinearOperator((n, n), matvec=lu.solve, dtype=complex)
    mu = spla.eigs(op, k=k, which="LM", return_eigenvectors=False, tol=1e-10)
    lam = 1.0 / mu + shift
    return float(np.sort(np.abs(lam))[1])


def evolve(rho0, L, t_grid, cfg=None):
    """Integrate ``d rho/dt = L rho`` and return the states at ``t_grid``.

    Output states are hermitized; the trace drift is checked against
    ``1e-8``.
    """
    cfg = cfg or EvolveConfig()
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid[0] != 0 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must start at 0 and increase strictly")
    rho0 = np.asarray(rho0, dtype=complex)
    if L.matrix.nnz == 0:
        return [rho0.copy() for _ in t_grid]
    if len(t_grid) == 1:
        return [hermitize(rho0)]
    mat = L.matrix
    sol = solve_ivp(
        lambda t, y: mat @ y,
        (t_grid[0], t_grid[-1]),
        vec(rho0),
        t_eval=t_grid,
        rtol=cfg.rtol,
        atol=cfg.atol,
        method=cfg.method,
    )
    if not sol.success:
        raise SolverError(f"integration failed: {sol.message}")
    out = [hermitize(unvec(sol.y[:, i], L.dim)) for i in range(len(t_grid))]
    drift = max(abs(np.trace(r) - np.trace(rho0)) for r in out)
    if drift > 1e-8:
        raise SolverError(f"trace drifted by {drift:.3g}")
    return out
