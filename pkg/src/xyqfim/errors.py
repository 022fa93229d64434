"""Exception types raised across the package."""

from __future__ import annotations


class XYQFIMError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatchError(XYQFIMError, ValueError):
    """Array shapes are incompatible with the requested operation."""


class NotHermitianError(XYQFIMError, ValueError):
    pass


class NegativeEigenvalueError(XYQFIMError, ValueError):
    """A matrix required to be positive semidefinite has a negative eigenvalue."""


class InvalidStateError(XYQFIMError, ValueError):
    """A matrix fails the density-matrix checks (trace, hermiticity, positivity)."""


class DomainError(XYQFIMError, ValueError):
    """Model parameters are outside their physical domain (e.g. ``T <= 0``)."""


class UnknownNameError(XYQFIMError, KeyError):
    pass


class NumericalError(XYQFIMError, ArithmeticError):
    """A numerical sanity check on an intermediate result failed."""


class StepUnderflowError(XYQFIMError, ValueError):
    """A finite-difference step is not strictly positive."""
