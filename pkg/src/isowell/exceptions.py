"""Exception hierarchy shared by every isowell module."""


class IsowellError(Exception):
    """Base class for all errors raised by isowell."""


class DomainError(IsowellError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class ConvergenceError(IsowellError, ArithmeticError):
    """An iterative procedure stopped before reaching its tolerance.

    Attributes
    ----------
    estimate : float or ndarray
        Best estimate available when the iteration stopped.
    error : float
        Error indicator attached to ``estimate``.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class StiffnessError(ConvergenceError):
    """ODE step size underflowed before the end of the interval."""


class SingularPotentialError(DomainError):
    """The Wronskian vanishes, so the deformed potential is singular."""

    def __init__(self, message, xi=None):
        super().__init__(message)
        self.xi = xi


class ConstructionError(IsowellError):
    """A constructed eigenbasis failed its Hamiltonian residual check."""


class ConfigError(IsowellError, ValueError):
    """A run configuration failed validation."""


class ConfigWarning(UserWarning):
    """A configuration is valid but close to the limits of the numerics."""


class CapturedNormWarning(UserWarning):
    """A wave packet is poorly represented by the truncated basis."""
