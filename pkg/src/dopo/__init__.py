"""Degenerate optical parametric oscillator simulator.

Subpackages and modules:

* :mod:`dopo.fock`, :mod:`dopo.liouville`: truncated Fock operators and Liouvillians;
* :mod:`dopo.full`: the two-mode master equation;
* :mod:`dopo.meanfield`: classical and mean-field equations;
* :mod:`dopo.cmop`: time-local c-MoP equations;
* :mod:`dopo.gsa`: Gaussian approximations and standard linearization;
* :mod:`dopo.observables`: photon statistics and Wigner functions;
* :mod:`dopo.cli`: command-line front end.
"""

from .errors import (ConfigError, DegenerateSteadyStateError, DimensionError, DopoError,
                     IllPosedFrameError, RateError, SolverError, TruncationError,
                     UndefinedG2Error, UnsupportedMomentError)
from .params import DopoParams

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "DegenerateSteadyStateError", "DimensionError", "DopoError", "DopoParams",
    "IllPosedFrameError", "RateError", "SolverError", "TruncationError", "UndefinedG2Error",
    "UnsupportedMomentError", "__version__",
]
