"""Gaussian branch records and the symmetry-restoring mixture."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..observables import GaussianMixture, GaussianMoments

STD = "std-linearization"
GSA_FULL = "gsa-full"
GSA_CMOP = "gsa-cmop"

BT = "BT"
AT_PLUS = "AT-plus"
AT_MINUS = "AT-minus"


@dataclass(frozen=True, eq=False)
class GaussianBranch:
    """One Gaussian solution: amplitudes and fluctuation moments of both modes.

    ``alpha_p`` is the lab-frame pump amplitude.  ``born_aux`` holds the
    auxiliary memory moments of the c-MoP variant.  ``diverged`` marks
    linearized solutions whose fluctuation equations have no steady state.
    """

    method: str
    branch: str
    alpha_s: complex
    alpha_p: complex
    n_s: float
    n_p: float
    m_s: complex
    m_p: complex
    born_aux: dict = None
    converged: bool = True
    residual: float = 0.0
    diverged: bool = False
    sigma: float = float("nan")

    @property
    def signal(self):
        return GaussianMoments(complex(self.alpha_s), float(self.n_s), complex(self.m_s))

    @property
    def photon_number(self):
        return float(self.n_s + abs(self.alpha_s) ** 2)

    @property
    def g2(self):
        return self.signal.g2

    def is_physical(self, tol=1e-8):
        ok_s = self.n_s >= -tol and self.n_s * (self.n_s + 1) >= abs(self.m_s) ** 2 - tol
        ok_p = self.n_p >= -tol and self.n_p * (self.n_p + 1) >= abs(self.m_p) ** 2 - tol
        return bool(np.isfinite(self.n_s) and ok_s and ok_p)

    def mirrored(self):
        """The Z2 partner ``alpha_s -> -alpha_s``."""
        other = {BT: BT, AT_PLUS: AT_MINUS, AT_MINUS: AT_PLUS}[self.branch]
        return GaussianBranch(self.method, other, -self.alpha_s, self.alpha_p, self.n_s, self.n_p,
                              self.m_s, self.m_p, self.born_aux, self.converged, self.residual,
                              self.diverged, self.sigma)


def balanced_mixture(plus, minus):
    """Equal-weight mixture of a symmetry-broken pair.

    Raises
    ------
    ValueError
        If the branches are not Z2 partners.
    """
    scale = max(1.0, abs(plus.alpha_s))
    if (abs(plus.alpha_s + minus.alpha_s) > 1e-8 * scale
            or abs(plus.n_s - minus.n_s) > 1e-8 * max(1.0, abs(plus.n_s))
            or abs(plus.m_s - minus.m_s) > 1e-8 * max(1.0, abs(plus.m_s))):
        raise ValueError("branches are not a +/- pair")
    return GaussianMixture((plus.signal, minus.signal))


def headline_state(branches):
    """Signal state used for reported observables.

    The balanced AT mixture when an AT pair exists with ``|alpha_s|^2 > n_s``,
    otherwise the BT Gaussian.
    """
    at = [b for b in branches if b.branch in (AT_PLUS, AT_MINUS) and b.converged]
    if len(at) >= 2:
        plus = next(b for b in at if b.branch == AT_PLUS)
        minus = next(b for b in at if b.branch == AT_MINUS)
        if abs(plus.alpha_s) ** 2 > plus.n_s:
            return balanced_mixture(plus, minus)
    bt = [b for b in branches if b.branch == BT]
    if not bt:
        raise ValueError("no BT branch available")
    return bt[0].signal
