"""Quantitative stability checks for the standard planar double bubble."""
from .errors import (BubbleError, ConsistencyError, DomainError, GateError, GeometryError,
                     InfeasibleCorrection, NumericError, PerturbationTooLarge,
                     PreconditionError, SearchError, UnboundedBelow, VerificationFailure)
from .geometry import StandardBubble, equal_from_radius, from_masses, from_r1
from .perturbation import PerturbedBubble, deficit, enforce_volumes
from .profiles import ArcProfile, moments

__version__ = "0.1.0"

__all__ = [
    "ArcProfile", "BubbleError", "ConsistencyError", "DomainError", "GateError",
    "GeometryError", "InfeasibleCorrection", "NumericError", "PerturbationTooLarge",
    "PerturbedBubble", "PreconditionError", "SearchError", "StandardBubble",
    "UnboundedBelow", "VerificationFailure", "deficit", "enforce_volumes",
    "equal_from_radius", "from_masses", "from_r1", "moments",
]
