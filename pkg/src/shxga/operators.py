"""Parent sampling and the two offspring generators (BLX-alpha, SPX).

Both operators emit unevaluated individuals clipped to the search box; they
never touch the evaluation counter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Individual

Bounds = tuple[np.ndarray, np.ndarray]

KINDS = ("blx", "spx")


@dataclass(frozen=True)
class CrossoverSpec:
    """Which operator to use and its expansion parameters.

    ``alpha`` is the BLX interval expansion; ``epsilon`` the SPX simplex
    expansion rate, defaulting to sqrt(dim + 2) when left as None.
    """

    kind: str
    alpha: float = 0.5
    epsilon: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown crossover {self.kind!r}; valid kinds: {', '.join(KINDS)}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if self.epsilon is not None and self.epsilon <= 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")

    def parents_required(self, dim: int) -> int:
        return 2 if self.kind == "blx" else dim + 1

    def expansion(self, dim: int) -> float:
        return math.sqrt(dim + 2) if self.epsilon is None else self.epsilon


def sample_parents(
    pop: list[Individual], m: int, rng: np.random.Generator
) -> list[Individual]:
    """Draw m distinct individuals uniformly without replacement."""
    if m > len(pop):
        raise ValueError(f"cannot sample {m} parents from a pool of {len(pop)}")
    idx = rng.choice(len(pop), size=m, replace=False)
    return [pop[i] for i in idx]


def blx_alpha(
    p1: Individual,
    p2: Individual,
    alpha: float,
    bounds: Bounds,
    rng: np.random.Generator,
) -> Individual:
    """Blend crossover: each child gene uniform on the alpha-expanded parent interval."""
    g1, g2 = p1.genes, p2.genes
    if g1.shape != g2.shape:
        raise ValueError(f"parent dimensions differ: {g1.shape} vs {g2.shape}")
    lo = np.minimum(g1, g2)
    hi = np.maximum(g1, g2)
    span = alpha * (hi - lo)
    child = rng.uniform(lo - span, hi + span)
    return Individual(np.clip(child, bounds[0], bounds[1]))


def spx(
    parents: list[Individual],
    epsilon: float,
    bounds: Bounds,
    rng: np.random.Generator,
) -> Individual:
    """Simplex crossover: child uniform on the epsilon-expanded parent simplex.

    The dim+1 parent vertices are expanded about their centroid by ``epsilon``
    and the child is drawn by the standard recursive construction
    (r_k = u^(1/(k+1)); c_k = r_{k-1} * (y_{k-1} - y_k + c_{k-1})).
    """
    x = np.stack([p.genes for p in parents])
    dim = x.shape[1]
    if len(parents) != dim + 1:
        raise ValueError(f"SPX needs dim+1 = {dim + 1} parents, got {len(parents)}")
    center = x.mean(axis=0)
    y = center + epsilon * (x - center)
    u = rng.random(dim)
    r = u ** (1.0 / np.arange(1, dim + 1))  # r_k = u_k^(1/(k+1)), k = 0..dim-1
    c = np.zeros(dim)
    for k in range(1, dim + 1):
        c = r[k - 1] * (y[k - 1] - y[k] + c)
    child = y[dim] + c
    return Individual(np.clip(child, bounds[0], bounds[1]))


def generate_candidates(
    pop: list[Individual],
    spec: CrossoverSpec,
    count: int,
    bounds: Bounds,
    rng: np.random.Generator,
    fresh_parents: bool = True,
) -> list[Individual]:
    """Produce ``count`` unevaluated candidates from the population.

    By default every candidate gets its own freshly sampled parent set;
    ``fresh_parents=False`` reuses a single parent set for the whole batch
    (ablation switch).
    """
    if count == 0:
        return []
    dim = pop[0].genes.shape[0]
    m = spec.parents_required(dim)
    if len(pop) < m:
        raise ValueError(f"pool of {len(pop)} is smaller than the {m} parents required")
    out: list[Individual] = []
    parents: list[Individual] | None = None
    for _ in range(count):
        if fresh_parents or parents is None:
            parents = sample_parents(pop, m, rng)
        if spec.kind == "blx":
            child = blx_alpha(parents[0], parents[1], spec.alpha, bounds, rng)
        else:
            child = spx(parents, spec.expansion(dim), bounds, rng)
        out.append(child)
    return out
