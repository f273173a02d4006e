"""Value types shared by every module: individuals, evaluation accounting, RNG.

Randomness contract
-------------------
A single run draws every random number from one ``numpy.random.Generator``
backed by PCG64 (``make_rng(seed)``).  Identical seeds therefore reproduce
identical runs bit for bit on a given numpy version.  The draw order is fixed:

1. population init: one ``uniform`` call of shape (population, dim)
2. archive init (history-driven runs only): one ``uniform`` call of shape
   (capacity, dim)
3. initial k-means centroids (history-driven runs only): one ``choice`` call
   sampling k distinct archive rows
4. per generation, in order:
   a. per candidate: one ``choice`` call (parent indices), then one operator
      call (``uniform`` of shape (dim,) for BLX, ``random`` of shape (dim,)
      for SPX)
   b. offspring selection (history-driven runs only): per pick, one
      ``random()`` for the roulette spin, then one ``integers`` draw for the
      uniform choice inside the winning cluster
   c. random-policy archive update: one ``choice`` call (replacement slots),
      skipped entirely when no survivors were accepted

Warm-started k-means refits consume no randomness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def make_rng(seed: int) -> np.random.Generator:
    """Return the repo-wide generator (PCG64) for the given seed."""
    return np.random.Generator(np.random.PCG64(seed))


@dataclass
class EvalCounter:
    """Counts objective calls. Incremented by exactly 1 per evaluation."""

    count: int = 0


@dataclass(eq=False)
class Individual:
    """A real-valued genome with an optional cached objective value.

    ``genes`` is copied and frozen at construction; any change of genes means
    constructing a new Individual, which starts with ``fitness = None``.  That
    keeps the cached fitness trustworthy and the evaluation count auditable.
    Identity (``is``) is the notion of sameness used throughout.
    """

    genes: np.ndarray
    fitness: float | None = None

    def __post_init__(self) -> None:
        genes = np.array(self.genes, dtype=float)
        genes.flags.writeable = False
        self.genes = genes


def evaluate(ind: Individual, objective, counter: EvalCounter) -> float:
    """Return the objective value of ``ind``, caching it on the individual.

    A repeated call on an already-evaluated individual returns the cache and
    does not touch the counter.
    """
    if ind.fitness is not None:
        return ind.fitness
    if ind.genes.shape[0] != objective.dim:
        raise ValueError(
            f"genome has {ind.genes.shape[0]} genes but objective "
            f"{objective.name!r} expects {objective.dim}"
        )
    value = float(objective(ind.genes))
    ind.fitness = value
    counter.count += 1
    return value
