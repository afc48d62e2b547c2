"""Scalar observables and Wigner functions of single-mode states.

Quadratures are ``x = a + a^+`` and ``p = i (a^+ - a)`` (vacuum variance 1).
The Wigner function is normalized to unit integral over ``dx dp``, so the
vacuum has ``W(0, 0) = 1 / (2 pi)``.
"""

from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la

from . import fock
from .errors import UndefinedG2Error

CONVENTION = "x=a+ad;p=i(ad-a);int W dxdp=1"
_MAGIC = b"WIGNER01"


# --- scalar observables -----------------------------------------------------


def photon_number(rho):
    dim = rho.shape[0]
    return float(np.real(np.diag(rho) @ np.arange(dim)))


def g2(rho, threshold=1e-12):
    """Zero-delay ``<a^+2 a^2> / <a^+ a>^2``.

    Raises :class:`UndefinedG2Error` when ``<a^+ a> <= threshold``.
    """
    p = np.real(np.diag(rho))
    k = np.arange(p.size, dtype=float)
    n = p @ k
    if n <= threshold:
        raise UndefinedG2Error(f"<a^+ a> = {n:.3g} is too small for g2")
    return float(p @ (k * (k - 1)) / n ** 2)


@dataclass(frozen=True)
class GaussianMoments:
    """Single-mode Gaussian state: mean ``alpha``, ``n = <da^+ da>``, ``m = <da^2>``."""

    alpha: complex = 0j
    n: float = 0.0
    m: complex = 0j

    def is_physical(self, tol=1e-8):
        return self.n >= -tol and self.n * (self.n + 1) >= abs(self.m) ** 2 - tol

    def covariance(self):
        """Symmetrized ``(x, p)`` covariance matrix."""
        vx = 2 * self.n + 1 + 2 * np.real(self.m)
        vp = 2 * self.n + 1 - 2 * np.real(self.m)
        c = 2 * np.imag(self.m)
        return np.array([[vx, c], [c, vp]])

    def mean(self):
        return np.array([2 * np.real(self.alpha), 2 * np.imag(self.alpha)])

    @property
    def photon_number(self):
        return self.n + abs(self.alpha) ** 2

    @property
    def g2(self):
        # <a^+2 a^2> of a Gaussian state via Wick's theorem
        a, n, m = self.alpha, self.n, self.m
        num = (abs(a) ** 4 + 4 * abs(a) ** 2 * n + 2 * np.real(np.conj(a) ** 2 * m)
               + abs(m) ** 2 + 2 * n ** 2)
        den = self.photon_number
        if den <= 1e-12:
            raise UndefinedG2Error("photon number too small for g2")
        return float(num / den ** 2)


@dataclass(frozen=True)
class GaussianMixture:
    """Convex combination of Gaussian states."""

    components: tuple
    weights: tuple = field(default=None)

    def __post_init__(self):
        w = self.weights
        if w is None:
            w = tuple([1.0 / len(self.components)] * len(self.components))
        if len(w) != len(self.components) or abs(sum(w) - 1) > 1e-12:
            raise ValueError("mixture weights must match components and sum to 1")
        object.__setattr__(self, "weights", tuple(float(x) for x in w))

    def _avg(self, f):
        return sum(w * f(c) for w, c in zip(self.weights, self.components))

    @property
    def alpha(self):
        return self._avg(lambda c: c.alpha)

    @property
    def photon_number(self):
        return float(np.real(self._avg(lambda c: c.photon_number)))

    @property
    def a2(self):
        return self._avg(lambda c: c.m + c.alpha ** 2)

    @property
    def g2(self):
        num = self._avg(lambda c: c.g2 * c.photon_number ** 2)
        return float(num / self.photon_number ** 2)


def quadrature_variances(state):
    """``(<dx^2>, <dp^2>)`` of a density matrix or a Gaussian moment set."""
    if isinstance(state, GaussianMoments):
        cov = state.covariance()
        return float(cov[0, 0]), float(cov[1, 1])
    if isinstance(state, GaussianMixture):
        vx = vp = 0.0
        for w, c in zip(state.weights, state.components):
            cov, mu = c.covariance(), c.mean()
            vx += w * (cov[0, 0] + mu[0] ** 2)
            vp += w * (cov[1, 1] + mu[1] ** 2)
        mu = sum(w * c.mean() for w, c in zip(state.weights, state.components))
        return float(vx - mu[0] ** 2), float(vp - mu[1] ** 2)
    return quadrature_variances(moments_from_rho(state))


def moments_from_rho(rho):
    """Gaussian moment set (mean and fluctuations) matching a density matrix."""
    lad = fock.Ladder(rho.shape[0])
    a = lad.expect(lad.a, rho)
    n = np.real(lad.expect(lad.n, rho)) - abs(a) ** 2
    m = lad.expect(lad.a2, rho) - a ** 2
    return GaussianMoments(complex(a), float(n), complex(m))


# --- Wigner functions -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class WignerGrid:
    """Wigner function sampled on a Cartesian grid, ``values[i, j] = W(x[i], p[j])``."""

    x: np.ndarray
    p: np.ndarray
    values: np.ndarray

    @property
    def dx(self):
        return float(self.x[1] - self.x[0])

    @property
    def dp(self):
        return float(self.p[1] - self.p[0])

    def normalization(self):
        return float(self.values.sum() * self.dx * self.dp)

    def moment(self, fx):
        X, P = np.meshgrid(self.x, self.p, indexing="ij")
        return float((fx(X, P) * self.values).sum() * self.dx * self.dp)

    def point_asymmetry(self):
        """``max |W(x, p) - W(-x, -p)|``; meaningful on grids symmetric about 0."""
        return float(np.abs(self.values - self.values[::-1, ::-1]).max())

    def local_maxima(self, rel_threshold=1e-3):
        """Grid points strictly larger than their 8 neighbours and above ``rel_threshold * max``."""
        w = self.values
        pad = np.pad(w, 1, mode="constant", constant_values=-np.inf)
        core = pad[1:-1, 1:-1]
        is_max = np.ones_like(w, dtype=bool)
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                if di == dj == 0:
                    continue
                nb = pad[1 + di:pad.shape[0] - 1 + di, 1 + dj:pad.shape[1] - 1 + dj]
                is_max &= core > nb
        is_max &= w > rel_threshold * w.max()
        idx = np.argwhere(is_max)
        return [(float(self.x[i]), float(self.p[j])) for i, j in idx]

    def to_csv(self, path):
        X, P = np.meshgrid(self.x, self.p, indexing="ij")
        data = np.column_stack([X.ravel(), P.ravel(), self.values.ravel()])
        header = f"{CONVENTION}\nx,p,W"
        np.savetxt(path, data, delimiter=",", header=header, fmt="%.12e")

    def to_binary(self, path):
        """Row-major float64 matrix preceded by a header with shape, bounds and convention."""
        tag = CONVENTION.encode()
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(struct.pack("<qqdddd", len(self.x), len(self.p), self.x[0], self.x[-1],
                                 self.p[0], self.p[-1]))
            fh.write(struct.pack("<q", len(tag)))
            fh.write(tag)
            fh.write(np.ascontiguousarray(self.values, dtype="<f8").tobytes())

    @classmethod
    def from_binary(cls, path):
        with open(path, "rb") as fh:
            if fh.read(len(_MAGIC)) != _MAGIC:
                raise ValueError(f"{path} is not a Wigner grid file")
            nx, npts, x0, x1, p0, p1 = struct.unpack("<qqdddd", fh.read(48))
            (ntag,) = struct.unpack("<q", fh.read(8))
            fh.read(ntag)
            vals = np.frombuffer(fh.read(8 * nx * npts), dtype="<f8").reshape(nx, npts)
        return cls(np.linspace(x0, x1, nx), np.linspace(p0, p1, npts), vals.copy())


def default_grid(state, points=201):
    """Square grid over ``+-max(5, 4 sqrt(<x^2>))`` in both quadratures.

    For a density matrix of dimension ``d`` the bound is capped at
    ``2 sqrt(d) + 8``, beyond which every truncated Fock state has
    negligible Wigner weight.
    """
    if isinstance(state, (GaussianMoments, GaussianMixture)):
        comps = state.components if isinstance(state, GaussianMixture) else (state,)
        second = max(max(c.covariance()[0, 0] + c.mean()[0] ** 2,
                         c.covariance()[1, 1] + c.mean()[1] ** 2) for c in comps)
    else:
        mom = moments_from_rho(state)
        cov, mu = mom.covariance(), mom.mean()
        second = max(cov[0, 0] + mu[0] ** 2, cov[1, 1] + mu[1] ** 2)
    bound = 4.0 * np.sqrt(second)
    if not isinstance(state, (GaussianMoments, GaussianMixture)):
        bound = min(bound, 2.0 * np.sqrt(np.shape(state)[0]) + 8.0)
    bound = max(5.0, bound)
    g = np.linspace(-bound, bound, points)
    return g, g.copy()


def wigner_from_rho(rho, x=None, p=None, warn_tol=1e-6):
    """Wigner function of a truncated density matrix.

    Uses the Laguerre recursion for the Wigner functions of ``|m><n|``,
    which equals the displaced-parity expectation value exactly in the
    truncated basis.  A warning is issued when the top two Fock levels
    carry more than ``warn_tol`` population.
    """
    rho = np.asarray(rho)
    if x is None or p is None:
        x, p = default_grid(rho)
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    dim = rho.shape[0]
    tail = float(np.real(np.diag(rho)[-2:]).sum())
    if tail > warn_tol:
        warnings.warn(f"Fock truncation may be too small: top-level population {tail:.2g}",
                      RuntimeWarning, stacklevel=2)
    # drop the numerically empty tail to save work
    keep = np.nonzero(np.abs(rho).max(axis=0) > 1e-16)[0]
    dim = int(keep.max()) + 1 if keep.size else 1
    X, P = np.meshgrid(x, p, indexing="ij")
    A = 0.5 * (X + 1j * P)
    W = _wigner_laguerre(rho[:dim, :dim], A)
    return WignerGrid(x, p, W)


def _laguerre_clenshaw(L, x, c):
    """``sum_k c_k l_k^L(x)`` for the normalized Laguerre functions by Clenshaw's recurrence."""
    n = len(c)
    if n == 1:
        return c[0] + 0 * x
    y0, y1 = c[-2] + 0 * x, c[-1] + 0 * x
    k = n
    for i in range(3, n + 1):
        k -= 1
        y0, y1 = (c[-i] - y1 * np.sqrt((k - 1) * (L + k - 1) / ((L + k) * k)),
                  y0 - y1 * ((L + 2 * k - 1) - x) / np.sqrt((L + k) * k))
    return y0 - y1 * ((L + 1) - x) / np.sqrt(L + 1)


def _wigner_series(rho, A, dtype):
    dim = rho.shape[0]
    A2 = (2 * A).astype(dtype)
    B = np.abs(A2) ** 2
    r = np.asarray(rho, dtype=dtype) * (2 - np.eye(dim))
    w = _laguerre_clenshaw(dim - 1, B, np.diagonal(r, dim - 1))
    for L in range(dim - 2, -1, -1):
        w = _laguerre_clenshaw(L, B, np.diagonal(r, L)) + w * A2 / np.sqrt(L + 1)
    return np.asarray(np.real(w) * np.exp(-B / 2) / (2 * np.pi), dtype=float)


def _wigner_laguerre(rho, A):
    """Wigner function at ``alpha = A`` from the Laguerre series of each diagonal of ``rho``.

    Diagonal ``L`` is summed by Clenshaw's recurrence and the diagonals are
    combined by Horner's rule in ``2 alpha``.  Far from the origin the
    partial sums overflow double precision before the Gaussian damping is
    applied; those points are recomputed in extended precision.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        W = _wigner_series(rho, A, complex)
    bad = ~np.isfinite(W)
    if bad.any():
        W[bad] = _wigner_series(rho, A[bad], np.clongdouble)
    return W


def wigner_displaced_parity(rho, x, p, work_dim=None):
    """Brute-force Wigner function ``Tr(rho D(b) Pi D(b)^+) / (2 pi)``, ``b = (x + i p) / 2``.

    Slow; used as a reference.  The state is embedded in ``work_dim`` levels
    so that the displaced parity is accurate on the support of ``rho``.
    """
    dim = rho.shape[0]
    wd = work_dim or 2 * dim + 20
    big = np.zeros((wd, wd), dtype=complex)
    big[:dim, :dim] = rho
    a = fock.annihilation(wd).astype(complex)
    parity = np.diag((-1.0) ** np.arange(wd))
    out = np.empty((len(x), len(p)))
    for i, xi in enumerate(x):
        for j, pj in enumerate(p):
            b = 0.5 * (xi + 1j * pj)
            D = la.expm(b * a.conj().T - np.conj(b) * a)
            out[i, j] = np.real(np.trace(big @ D @ parity @ D.conj().T)) / (2 * np.pi)
    return WignerGrid(np.asarray(x, float), np.asarray(p, float), out)


def wigner_from_gaussian(state, x=None, p=None):
    """Closed-form Wigner function of a Gaussian state or of a Gaussian mixture."""
    if x is None or p is None:
        x, p = default_grid(state)
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    X, P = np.meshgrid(x, p, indexing="ij")
    if isinstance(state, GaussianMixture):
        W = sum(w * _gaussian_w(c, X, P) for w, c in zip(state.weights, state.components))
    else:
        W = _gaussian_w(state, X, P)
    return WignerGrid(x, p, W)


def _gaussian_w(g, X, P):
    if not g.is_physical():
        raise ValueError(f"unphysical Gaussian moments n={g.n}, m={g.m}")
    V = g.covariance()
    det = V[0, 0] * V[1, 1] - V[0, 1] ** 2
    mu = g.mean()
    dx, dp = X - mu[0], P - mu[1]
    q = (V[1, 1] * dx ** 2 - 2 * V[0, 1] * dx * dp + V[0, 0] * dp ** 2) / det
    return np.exp(-0.5 * q) / (2 * np.pi * np.sqrt(det))
