"""Population dynamics for the distribution of coloring surveys.

The ensemble analogue of survey propagation on a single graph: a pool of S
surveys stands in for the distribution over directed edges of a random
graph with Poisson(z) degrees. One sweep performs S asynchronous member
replacements, each combining n ~ Poisson(z) randomly drawn members;
all-forbidden draws are redrawn, restricting the ensemble to zero-energy
messages.

Two Monte Carlo estimators measure how the log-count of survey fixed
points responds to growing the graph at fixed mean degree:

* edge term: E[ln(1 - sum_c w_i(c) w_k(c))] over pairs of synthesized
  full node marginals,
* site term: E[ln P(neighbors leave a color free)] with k ~ Poisson(z)
  synthesized neighbor marginals, by inclusion-exclusion.

Their combination Sigma(z) = site - (z/2) * edge is the complexity: it
jumps to a positive value where the nontrivial survey distribution first
appears and crosses zero where proper colorings stop existing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InstabilityError, PopulationCollapseError
from .rng import as_generator, kernel_seed

__all__ = [
    "Population",
    "EstimatorResult",
    "ComplexityPoint",
    "ComplexityCurve",
    "Thresholds",
    "initial_population",
    "population_sweep",
    "equilibrate",
    "delta_sigma_edge",
    "delta_sigma_site",
    "complexity",
    "threshold_scan",
]

MIN_POPULATION = 1_000
MAX_Z = 32.0
DEFAULT_SWEEPS = 200
DEFAULT_TRIVIAL_FLOOR = 1e-3
DEFAULT_ETA = 0.1
MAX_RETRIES = 200
REJECT_LIMIT = 0.5


@dataclass
class Population:
    """Pool of surveys plus the ensemble parameters that evolve it."""
    members: np.ndarray
    z: float
    q: int
    rng: np.random.Generator

    def __post_init__(self):
        S, width = self.members.shape
        if S < MIN_POPULATION:
            raise ValueError(f"population size must be >= {MIN_POPULATION}")
        if width != self.q + 1:
            raise ValueError("member width must be q + 1")
        if not 0 < self.z <= MAX_Z:
            raise ValueError(f"z must lie in (0, {MAX_Z}]")
        if self.q < 2:
            raise ValueError("q must be >= 2")

    @property
    def size(self) -> int:
        return self.members.shape[0]

    def white_mass(self) -> float:
        return float(self.members[:, 0].mean())

    def _buffers(self):
        q = self.q
        return (np.zeros(1 << q), np.zeros(1 << q), np.zeros(q + 1),
                np.zeros((128, q + 1)))


@dataclass(frozen=True)
class EstimatorResult:
    mean: float
    std_error: float
    accepted: int
    rejected: int

    @property
    def reject_fraction(self) -> float:
        total = self.accepted + self.rejected
        return self.rejected / total if total else 0.0


def initial_population(S: int, z: float, q: int, seed=None,
                       eta: float = DEFAULT_ETA) -> Population:
    """Members biased on random colors: (1-eta) on one color, eta uniform.

    eta must be positive: exactly pure members are a fixed manifold of the
    combine rule (deltas in, deltas out), so the pool would never develop
    the interior survey distribution the estimators measure.
    """
    if not 0.0 < eta <= 1.0:
        raise ValueError("eta must lie in (0, 1]")
    rng = as_generator(seed)
    members = np.full((S, q + 1), eta / (q + 1))
    colors = rng.integers(1, q + 1, size=S)
    members[np.arange(S), colors] += 1.0 - eta
    return Population(members=members, z=float(z), q=q, rng=rng)


def population_sweep(pop: Population, max_retries: int = MAX_RETRIES) -> None:
    """One asynchronous sweep (S replacements) in place."""
    state, new_state, out, gathered = pop._buffers()
    _kernels.seed_kernel(kernel_seed(pop.rng))
    rc = _kernels.population_sweep(pop.members, pop.z, pop.q, max_retries,
                                   state, new_state, out, gathered)
    if rc != 0:
        raise PopulationCollapseError(
            f"no non-contradictory draw in {max_retries} tries")


def equilibrate(pop: Population, sweeps: int = DEFAULT_SWEEPS,
                max_retries: int = MAX_RETRIES) -> None:
    for _ in range(sweeps):
        population_sweep(pop, max_retries)


def _finalize(total, totsq, accepted, rejected, what) -> EstimatorResult:
    samples = accepted + rejected
    if samples and rejected / samples > REJECT_LIMIT:
        raise InstabilityError(
            f"{what}: rejected {rejected}/{samples} samples",
            reject_fraction=rejected / samples)
    if accepted == 0:
        raise InstabilityError(f"{what}: no accepted samples", reject_fraction=1.0)
    mean = total / accepted
    var = max(totsq / accepted - mean * mean, 0.0)
    return EstimatorResult(mean=mean,
                           std_error=math.sqrt(var / accepted),
                           accepted=accepted, rejected=rejected)


def delta_sigma_edge(pop: Population, samples: int,
                     max_retries: int = MAX_RETRIES) -> EstimatorResult:
    """Monte Carlo E[ln(1 - sum_c w_i(c) w_k(c))] over marginal pairs.

    Pairs with a nonpositive log argument (both marginals frozen on the
    same color) are rejected and counted; a rejection fraction above 1/2
    raises InstabilityError.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    _kernels.seed_kernel(kernel_seed(pop.rng))
    total, totsq, acc, rej = _kernels.delta_sigma_edge(
        pop.members, pop.z, pop.q, samples, max_retries)
    return _finalize(total, totsq, acc, rej, "delta_sigma_edge")


def delta_sigma_site(pop: Population, samples: int,
                     max_retries: int = MAX_RETRIES) -> EstimatorResult:
    """Monte Carlo E[ln P(k ~ Poisson(z) neighbor warnings miss a color)]."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    _kernels.seed_kernel(kernel_seed(pop.rng))
    total, totsq, acc, rej = _kernels.delta_sigma_site(
        pop.members, pop.z, pop.q, samples, max_retries)
    return _finalize(total, totsq, acc, rej, "delta_sigma_site")


@dataclass(frozen=True)
class ComplexityPoint:
    z: float
    sigma: float
    std_error: float
    nontrivial: bool
    nonwhite_mass: float
    reject_fraction: float
    collapsed: bool = False


@dataclass
class ComplexityCurve:
    q: int
    points: list

    def nontrivial_points(self) -> list:
        return [p for p in self.points if p.nontrivial]


@dataclass(frozen=True)
class Thresholds:
    """Branch-appearance and zero-crossing locations with uncertainties.

    Either pair is None when the scan saw no nontrivial branch or no sign
    change on it.
    """
    z_dynamic: float | None
    z_dynamic_uncertainty: float | None
    z_critical: float | None
    z_critical_uncertainty: float | None


def complexity(z: float, q: int, S: int = 100_000, sweeps: int = DEFAULT_SWEEPS,
               samples: int = 100_000, seed=None, eta: float = DEFAULT_ETA,
               trivial_floor: float = DEFAULT_TRIVIAL_FLOOR) -> ComplexityPoint:
    """Equilibrate a fresh population at z and measure Sigma(z).

    A population that collapses or relaxes to white (mean colored mass
    under trivial_floor) reports sigma 0 with nontrivial=False; only a
    surviving branch is measured.
    """
    pop = initial_population(S, z, q, seed=seed, eta=eta)
    try:
        equilibrate(pop, sweeps)
    except PopulationCollapseError:
        return ComplexityPoint(z=z, sigma=0.0, std_error=0.0, nontrivial=False,
                               nonwhite_mass=0.0, reject_fraction=0.0,
                               collapsed=True)
    nonwhite = 1.0 - pop.white_mass()
    if nonwhite < trivial_floor:
        return ComplexityPoint(z=z, sigma=0.0, std_error=0.0, nontrivial=False,
                               nonwhite_mass=nonwhite, reject_fraction=0.0)
    edge = delta_sigma_edge(pop, samples)
    site = delta_sigma_site(pop, samples)
    sigma = site.mean - z / 2.0 * edge.mean
    err = math.sqrt(site.std_error**2 + (z / 2.0 * edge.std_error) ** 2)
    rej = (edge.rejected + site.rejected) / (edge.accepted + edge.rejected
                                             + site.accepted + site.rejected)
    return ComplexityPoint(z=z, sigma=sigma, std_error=err, nontrivial=True,
                           nonwhite_mass=nonwhite, reject_fraction=rej)


def threshold_scan(q: int, z_grid, S: int = 100_000, sweeps: int = 600,
                   samples: int = 100_000, seed=None, eta: float = DEFAULT_ETA,
                   trivial_floor: float = DEFAULT_TRIVIAL_FLOOR,
                   refine_steps: int = 3):
    """Sigma(z) over a grid plus threshold estimates.

    Returns (ComplexityCurve, Thresholds). The branch-appearance point is
    bisection-refined between the last trivial and first nontrivial grid
    points; the zero crossing is linearly interpolated between the
    bracketing nontrivial points. The default burn-in is deeper than a
    single complexity call because classification near the appearance
    point needs extra equilibration margin.
    """
    z_grid = sorted(float(z) for z in z_grid)
    if len(z_grid) < 2:
        raise ValueError("need at least two grid points")
    rng = as_generator(seed)

    def run(z):
        return complexity(z, q, S=S, sweeps=sweeps, samples=samples,
                          seed=rng, eta=eta, trivial_floor=trivial_floor)

    points = [run(z) for z in z_grid]
    curve = ComplexityCurve(q=q, points=points)

    first_on = next((k for k, p in enumerate(points) if p.nontrivial), None)
    if first_on is None:
        return curve, Thresholds(None, None, None, None)

    # refine the appearance point
    if first_on == 0:
        z_d = points[0].z
        z_d_err = (z_grid[1] - z_grid[0])
    else:
        lo, hi = z_grid[first_on - 1], z_grid[first_on]
        for _ in range(refine_steps):
            mid = 0.5 * (lo + hi)
            if run(mid).nontrivial:
                hi = mid
            else:
                lo = mid
        z_d = 0.5 * (lo + hi)
        z_d_err = 0.5 * (hi - lo)

    # zero crossing on the nontrivial branch
    z_c = z_c_err = None
    branch = [p for p in points if p.nontrivial]
    for a, b in zip(branch, branch[1:]):
        if a.sigma > 0.0 >= b.sigma:
            slope = (b.sigma - a.sigma) / (b.z - a.z)
            z_c = a.z - a.sigma / slope
            w_a = (z_c - b.z) / (a.z - b.z)
            w_b = 1.0 - w_a
            z_c_err = math.sqrt((w_a * a.std_error) ** 2
                                + (w_b * b.std_error) ** 2) / abs(slope)
            break
    return curve, Thresholds(z_d, z_d_err, z_c, z_c_err)
