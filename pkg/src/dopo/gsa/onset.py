"""Onset of the symmetry-broken Gaussian branches."""

from __future__ import annotations

from .branch import AT_PLUS, GSA_CMOP, GSA_FULL
from .cmop import gsa_cmop
from .full import gsa_full

_SOLVERS = {GSA_FULL: gsa_full, GSA_CMOP: gsa_cmop}


def has_at_branch(params, method=GSA_FULL):
    return any(b.branch == AT_PLUS for b in _SOLVERS[method](params))


def at_onset(params, method=GSA_FULL, lo=1.0, hi=None, tol=1e-4):
    """Smallest ``sigma`` at which a physical AT pair is found, by bisection.

    ``params`` supplies the rates; its ``eps_p`` is ignored.  ``hi``
    defaults to the first of ``1.5, 2, 4, 8, ...`` with an AT pair.
    Returns ``None`` if no pair appears below ``sigma = 64``.
    """
    if method not in _SOLVERS:
        raise ValueError(f"unknown method {method!r}")
    if hi is None:
        hi = 1.5
        while not has_at_branch(params.with_sigma(hi), method):
            hi *= 2
            if hi > 64:
                return None
    elif not has_at_branch(params.with_sigma(hi), method):
        return None
    if has_at_branch(params.with_sigma(lo), method):
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if has_at_branch(params.with_sigma(mid), method):
            hi = mid
        else:
            lo = mid
    return hi
