"""Gaussian state approximations: standard linearization, GSA of the full model and of c-MoP."""

from .branch import (AT_MINUS, AT_PLUS, BT, GSA_CMOP, GSA_FULL, STD, GaussianBranch,
                     balanced_mixture, headline_state)
from .cmop import GsaCmopModel, gsa_cmop, gsa_cmop_dynamics
from .full import gsa_full, gsa_full_dynamics
from .linearization import lyapunov_moments, std_linearization
from .onset import at_onset
from .wick import GaussianModes, expect, moment_factorize

__all__ = [
    "AT_MINUS", "AT_PLUS", "BT", "GSA_CMOP", "GSA_FULL", "STD", "GaussianBranch", "GaussianModes",
    "GsaCmopModel", "at_onset", "balanced_mixture", "expect", "gsa_cmop", "gsa_cmop_dynamics",
    "gsa_full", "gsa_full_dynamics", "headline_state", "lyapunov_moments", "moment_factorize",
    "std_linearization",
]
