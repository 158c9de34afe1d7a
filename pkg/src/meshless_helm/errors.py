"""Exception hierarchy shared by the solver modules."""


class MeshlessError(Exception):
    """Base class for every error raised by :mod:`meshless_helm`."""


class DomainError(MeshlessError, ValueError):
    """An argument lies outside the mathematical domain of a function."""


class BesselOverflowError(MeshlessError, OverflowError):
    """A result does not fit in double precision."""


class QuadratureError(MeshlessError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance.

    The best estimate and its error bound are kept on the exception so
    callers can decide whether the result is still usable.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class GeometryError(MeshlessError, ValueError):
    """Invalid or unsupported geometric configuration."""


class SolverError(MeshlessError, ArithmeticError):
    """A linear solve or a time step could not be completed."""


class RankDeficientError(SolverError):
    """The collocation matrix is numerically singular."""


class UnsupportedFeatureError(MeshlessError, NotImplementedError):
    """A representable but unimplemented problem feature was requested."""


class ConfigError(MeshlessError, ValueError):
    """A run configuration failed validation."""
