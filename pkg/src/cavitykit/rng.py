"""Seed handling helpers.

Every stochastic routine in the package accepts either an integer seed or an
already-constructed numpy Generator. Child seeds for subtasks are spawned
through SeedSequence so parallel or resumed schedules stay reproducible.
"""
from __future__ import annotations

import numpy as np

SeedLike = "int | np.random.Generator | np.random.SeedSequence | None"


def as_generator(seed=None) -> np.random.Generator:
    """Coerce an int seed, SeedSequence, Generator, or None to a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def spawn_seeds(seed, n: int) -> list[int]:
    """Derive n independent 32-bit child seeds from a root seed.

    The schedule depends only on the root seed, never on consumption order,
    so per-sample work can be partitioned across workers without changing
    any result.
    """
    if isinstance(seed, np.random.Generator):
        # draw a root for the sequence from the generator itself
        seed = int(seed.integers(0, 2**63 - 1))
    ss = np.random.SeedSequence(seed)
    return [int(s.generate_state(1)[0]) for s in ss.spawn(n)]


def kernel_seed(rng: np.random.Generator) -> int:
    """A fresh 31-bit seed for numba's internal RNG, drawn from rng."""
    return int(rng.integers(1, 2**31 - 1))
