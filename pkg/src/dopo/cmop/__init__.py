"""Time-local c-MoP equations for the DOPO."""

from .core import (CmopState, CmopSteady, CmopSystem, CmopTrajectory, SignalCorrelators,
                   adiabatic_liouvillian, adiabatic_steady, cmop_integrate, cmop_relax, cmop_rhs,
                   cmop_steady, correlator_vectors, signal_correlator_coefficients, vacuum_state)
from .decomposition import CorrelationDecomposition, correlation_decomposition, correlation_matrix
from .pump import AUX_LABELS, MatrixPump, PumpCorrelators, PumpMoments, moment_rhs, moment_steady

__all__ = [
    "AUX_LABELS", "CmopState", "CmopSteady", "CmopSystem", "CmopTrajectory",
    "CorrelationDecomposition", "MatrixPump", "PumpCorrelators", "PumpMoments",
    "SignalCorrelators", "adiabatic_liouvillian", "adiabatic_steady", "cmop_integrate",
    "cmop_relax", "cmop_rhs", "cmop_steady", "correlation_decomposition", "correlation_matrix",
    "correlator_vectors", "moment_rhs", "moment_steady", "signal_correlator_coefficients",
    "vacuum_state",
]
