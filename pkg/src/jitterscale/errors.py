"""Exception hierarchy.

Numerical failures derive from :class:`numpy.linalg.LinAlgError` so callers
that already catch the numpy error keep working.
"""
import numpy as np


class JitterScaleError(Exception):
    """Base class for every error raised by this package."""


class NumericalError(JitterScaleError, np.linalg.LinAlgError):
    """A matrix kernel could not produce a trustworthy result."""


class ExpmOverflowError(NumericalError, OverflowError):
    """The matrix exponential exceeds the representable floating-point range."""


class SingularInputError(NumericalError):
    """Logarithm requested for a matrix with an eigenvalue at zero."""

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class BranchViolationError(NumericalError):
    """Eigenvalue on the closed negative real axis; no principal logarithm."""

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class IllConditionedIntegralError(NumericalError):
    """The integral of the matrix exponential is numerically singular."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class PoleOnAxisError(NumericalError):
    """A transfer function was evaluated at one of its poles."""

    def __init__(self, message, omega=None):
        super().__init__(message)
        self.omega = omega


class AssumptionViolationError(JitterScaleError, ValueError):
    """Input breaks a modelling assumption (jitter size, sampling period)."""

    def __init__(self, message, indices=()):
        super().__init__(message)
        self.indices = tuple(indices)


class AliasingRiskError(AssumptionViolationError):
    """Recovered poles sit at (or past) the principal-branch boundary."""

    def __init__(self, message, eigenvalues=()):
        super().__init__(message)
        self.eigenvalues = tuple(eigenvalues)


class InvalidBoundsError(AssumptionViolationError):
    """Jitter bounds with ``lo <= -1`` or ``lo > hi``."""


class RangeViolationError(AssumptionViolationError):
    """Scheduling parameter outside the admissible LPV range."""


class JitterGenerationError(JitterScaleError, RuntimeError):
    """Rejection sampling gave up before filling the sequence."""


class DimensionMismatchError(JitterScaleError, ValueError):
    """Matrix or vector shapes are incompatible."""


class NotSisoError(JitterScaleError, ValueError):
    """A transfer-function path was asked to handle a MIMO system."""


class SystemParseError(JitterScaleError, ValueError):
    """A system or jitter description could not be parsed."""


class AliasingWarning(UserWarning):
    """Recovered oscillation may have been folded into the principal branch."""


class SamplingWarning(UserWarning):
    """Input signal had to be padded to the simulation horizon."""
