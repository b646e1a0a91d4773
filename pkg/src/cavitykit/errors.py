"""Exception types shared across the toolkit."""
from __future__ import annotations


class CavitykitError(Exception):
    """Base class for domain errors raised by this package."""


class IterationLimitError(CavitykitError):
    """A fixed-point iteration hit its iteration cap before converging.

    Carries the last iterate so callers can inspect how far it got.
    """

    def __init__(self, message: str, last_value: float, iterations: int):
        super().__init__(message)
        self.last_value = last_value
        self.iterations = iterations


class CapabilityError(CavitykitError):
    """The requested instance is outside the supported size envelope."""


class GenerationError(CavitykitError):
    """A random-graph generator exhausted its retry budget."""


class AllForbiddenError(CavitykitError):
    """Every color is forbidden: the survey combine has contradiction mass 1."""


class PopulationCollapseError(CavitykitError):
    """Population dynamics could not draw a non-contradictory update."""


class InstabilityError(CavitykitError):
    """A Monte Carlo estimator rejected too many samples to be trusted."""

    def __init__(self, message: str, reject_fraction: float):
        super().__init__(message)
        self.reject_fraction = reject_fraction
