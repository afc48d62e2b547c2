"""Physical parameters of the DOPO."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import RateError


@dataclass(frozen=True)
class DopoParams:
    """Rates of the resonant DOPO; all in the same inverse-time unit.

    ``sigma`` (injection parameter) and ``g2coupling`` are derived on access
    and never stored.
    """

    gamma_s: float = 1.0
    gamma_p: float = 1.0
    chi: float = 1.0
    eps_p: float = 0.0

    def __post_init__(self):
        for name in ("gamma_s", "gamma_p", "chi"):
            if not getattr(self, name) > 0:
                raise RateError(f"{name} must be > 0, got {getattr(self, name)}")
        if not self.eps_p >= 0:
            raise RateError(f"eps_p must be >= 0, got {self.eps_p}")

    @property
    def sigma(self):
        return self.chi * self.eps_p / (self.gamma_s * self.gamma_p)

    @property
    def g2coupling(self):
        return self.chi ** 2 / (self.gamma_p * self.gamma_s)

    @classmethod
    def from_sigma(cls, sigma, chi, gamma_s=1.0, gamma_p=1.0):
        if sigma < 0:
            raise RateError(f"sigma must be >= 0, got {sigma}")
        return cls(gamma_s, gamma_p, chi, sigma * gamma_s * gamma_p / chi)

    def with_sigma(self, sigma):
        return replace(self, eps_p=sigma * self.gamma_s * self.gamma_p / self.chi)
