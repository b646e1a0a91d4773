"""Cavity-method toolkit.

Key modules:
    graphs       sparse random graphs (Poisson, G(n,p), regular) and IO
    bethe        mean-field and cavity fixed points for the Ising model
    matching     random-cost assignment ensembles and exact solvers
    coloring     warning propagation and whitening for q-coloring
    surveys      survey propagation and decimation coloring
    population   population dynamics, complexity curve, thresholds
"""
from . import bethe, coloring, graphs, matching, population, surveys
from .errors import (
    AllForbiddenError,
    CapabilityError,
    CavitykitError,
    GenerationError,
    InstabilityError,
    IterationLimitError,
    PopulationCollapseError,
)

__version__ = "0.1.0"

__all__ = [
    "bethe",
    "coloring",
    "graphs",
    "matching",
    "population",
    "surveys",
    "AllForbiddenError",
    "CapabilityError",
    "CavitykitError",
    "GenerationError",
    "InstabilityError",
    "IterationLimitError",
    "PopulationCollapseError",
    "__version__",
]
