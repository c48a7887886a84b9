"""
Exception hierarchy for qws.

All errors derive from ValueError so callers that only catch ValueError keep
working.
"""


class QWSError(ValueError):
    """Base class for every error raised by qws."""


class GraphError(QWSError):
    """Malformed, disconnected or otherwise unsupported graph."""


class SchemeError(QWSError):
    """Weight scheme violates its setting (normalization, balance, c')."""


class CapacityError(QWSError):
    """Dense operator exceeds the desk-scale dimension cap."""


class EigenSolverError(QWSError):
    """Dense eigensolver failed or returned pairs with a large residual."""


class LiftError(QWSError):
    """Eigenvector lifting received a non-eigenvector or produced zero."""


class ParameterError(QWSError):
    """Invalid numeric parameter (quantum graph, scan range, support order)."""
