"""Exception hierarchy shared by the solvers."""


class DopoError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(DopoError, ValueError):
    """Operator or state dimensions are invalid or inconsistent."""


class RateError(DopoError, ValueError):
    """A dissipation rate or physical parameter is out of range."""


class SolverError(DopoError, RuntimeError):
    """An iterative solver or integrator failed to converge."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DegenerateSteadyStateError(SolverError):
    """More than one eigenvalue of the Liouvillian sits at zero."""


class TruncationError(DopoError, RuntimeError):
    """The truncated Fock space is too small for the requested accuracy."""

    def __init__(self, message, observable=None):
        super().__init__(message)
        self.observable = observable


class IllPosedFrameError(DopoError, ValueError):
    """Displacement leaves the free signal Liouvillian without a steady state."""


class UndefinedG2Error(DopoError, ValueError):
    """g2 requested for a state with (numerically) zero photons."""


class UnsupportedMomentError(DopoError, KeyError):
    """Gaussian factorization was asked for a moment it does not know."""


class ConfigError(DopoError, ValueError):
    """Invalid command line or config-file input."""
