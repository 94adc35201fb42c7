"""Exception hierarchy shared by every module of the package."""


class BubbleError(Exception):
    """Base class for all errors raised by bubblestab."""


class DomainError(BubbleError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class NumericError(BubbleError, ArithmeticError):
    """A numerical procedure (root finding, quadrature) failed."""


class ConsistencyError(BubbleError, AssertionError):
    """Two independent evaluations of the same quantity disagree."""


class PreconditionError(BubbleError, ValueError):
    """A smallness requirement on a perturbation profile is not met."""


class PerturbationTooLarge(BubbleError, ValueError):
    """The dilation needed to restore the volumes does not exist."""


class InfeasibleCorrection(BubbleError, ValueError):
    """The interface correction that restores the volumes has no real root."""


class GateError(PreconditionError):
    """A profile or dilation leaves the configured (eps, sigma) gate."""


class GeometryError(BubbleError):
    """A boundary polyline is not a simple closed curve."""


class SearchError(BubbleError):
    """The isometry search wandered outside the admissible region."""


class UnboundedBelow(BubbleError):
    """A constrained quadratic minimisation has no finite infimum."""


class VerificationFailure(BubbleError, AssertionError):
    """An inequality that must hold was found violated.

    These are build-breaking: they indicate either an implementation bug or a
    counterexample to a claimed estimate.
    """
