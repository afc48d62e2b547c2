"""Gaussian moment factorization.

Operators are written as ``(mode, dagger)`` pairs, e.g. ``("s", True)`` for
``a_s^+``.  For a Gaussian state every ordered moment of fluctuation
operators is the sum over perfect pairings of ordered two-point
contractions (Isserlis/Wick), and odd moments vanish.  Moments of the full
operators ``a = alpha + da`` follow by expanding every factor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from ..errors import UnsupportedMomentError

MAX_ORDER = 4


def parse_word(word, mode="s"):
    """``"ad ad a a"`` -> ``[(mode, True), (mode, True), (mode, False), (mode, False)]``."""
    if isinstance(word, str):
        out = []
        for tok in word.split():
            if tok not in ("a", "ad"):
                raise UnsupportedMomentError(f"unknown operator symbol {tok!r}")
            out.append((mode, tok == "ad"))
        return out
    return [tuple(op) for op in word]


@dataclass
class GaussianModes:
    """First and second moments of a multi-mode Gaussian state.

    ``alpha[k] = <a_k>``, ``n[(j, k)] = <da_j^+ da_k>`` and
    ``m[(j, k)] = <da_j da_k>``; missing cross terms are zero.
    """

    alpha: dict = field(default_factory=dict)
    n: dict = field(default_factory=dict)
    m: dict = field(default_factory=dict)

    @classmethod
    def single(cls, alpha=0.0, n=0.0, m=0.0, mode="s"):
        return cls({mode: complex(alpha)}, {(mode, mode): complex(n)}, {(mode, mode): complex(m)})

    def mean(self, op):
        mode, dag = op
        a = self.alpha.get(mode, 0j)
        return np.conj(a) if dag else a

    def _n(self, j, k):
        if (j, k) in self.n:
            return self.n[(j, k)]
        if (k, j) in self.n:
            return np.conj(self.n[(k, j)])
        return 0j

    def _m(self, j, k):
        return self.m.get((j, k), self.m.get((k, j), 0j))

    def contraction(self, x, y):
        """Ordered two-point function ``<dx dy>``."""
        (j, dx), (k, dy) = x, y
        if dx and not dy:
            return self._n(j, k)
        if not dx and dy:
            return self._n(k, j) + (1.0 if j == k else 0.0)
        if not dx:
            return self._m(j, k)
        return np.conj(self._m(j, k))


def _pairings(ops, contraction):
    if not ops:
        return 1.0 + 0j
    first, rest = ops[0], ops[1:]
    total = 0j
    for i, other in enumerate(rest):
        c = contraction(first, other)
        if c != 0:
            total += c * _pairings(rest[:i] + rest[i + 1:], contraction)
    return total


def moment_factorize(request, moments):
    """Gaussian value of an ordered moment of fluctuation operators.

    Parameters
    ----------
    request : str or sequence of (mode, dagger)
        E.g. ``"ad ad a a"`` for ``<da^+2 da^2>`` (single mode ``"s"``).
    moments : GaussianModes or (n, m)
        Second moments; a pair ``(n, m)`` is taken as the single mode ``"s"``.

    Raises
    ------
    UnsupportedMomentError
        For unknown symbols or orders above four.
    """
    ops = parse_word(request)
    if len(ops) > MAX_ORDER:
        raise UnsupportedMomentError(f"moments above order {MAX_ORDER} are not factorized")
    if not isinstance(moments, GaussianModes):
        n, m = moments
        moments = GaussianModes.single(0.0, n, m)
    if len(ops) % 2:
        return 0j
    return _pairings(list(ops), moments.contraction)


def expect(ops, state):
    """``<x_1 ... x_k>`` of full operators for a Gaussian ``state`` (any ordering)."""
    ops = parse_word(ops)
    if len(ops) > MAX_ORDER:
        raise UnsupportedMomentError(f"moments above order {MAX_ORDER} are not factorized")
    k = len(ops)
    total = 0j
    for r in range(0, k + 1, 2):
        for fl in combinations(range(k), r):
            coeff = 1.0 + 0j
            for i in range(k):
                if i not in fl:
                    coeff *= state.mean(ops[i])
            if coeff == 0:
                continue
            total += coeff * _pairings([ops[i] for i in fl], state.contraction)
    return total
