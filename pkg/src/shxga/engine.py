"""Generation loop of the real-coded GA, with optional history-driven
offspring selection.

Plain mode generates exactly ``offspring`` children per generation and
evaluates them.  History-driven mode over-generates ``candidates`` children,
assigns each to its nearest archive cluster, and narrows the pool down to
``offspring`` by cluster-score roulette before any evaluation happens, so both
modes spend an identical number of objective calls.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .benchmarks import Objective, make_objective
from .core import EvalCounter, Individual, evaluate, make_rng
from .history import (
    Archive,
    ClusterModel,
    assign_clusters,
    compute_scores,
    init_archive,
    kmeans_fit,
    update_random,
    update_sequential,
)
from .operators import CrossoverSpec, generate_candidates

ARCHIVE_POLICIES = ("random", "sequential")
SURVIVOR_RULES = ("truncation", "replace_worst")


@dataclass(frozen=True)
class RunConfig:
    """Full parameterization of a single seeded run."""

    function: str = "sphere"
    dim: int = 10
    population: int = 100
    generations: int = 100
    candidates: int = 180  # candidate pool size (history-driven mode)
    offspring: int = 60  # children evaluated per generation
    crossover: str = "blx"
    # 0.8 keeps blend crossover exploratory enough for the history filter to
    # have signal; the classic 0.5 over-contracts under this survivor rule
    alpha: float = 0.8
    epsilon: float | None = None  # None -> sqrt(dim + 2)
    fresh_parents: bool = True  # False: one parent set per candidate batch
    shx: bool = False  # history-driven offspring selection on/off
    archive_generations: int = 30
    clusters: int | None = None  # None -> archive capacity // 2
    archive_update: str = "sequential"
    # replace_worst keeps per-generation survivor batches at full offspring
    # size, which is what the 30-generation archive sizing assumes
    survivor_rule: str = "replace_worst"
    kmeans_tol: float = 1e-6
    kmeans_max_iters: int = 100
    seed: int = 0

    def __post_init__(self) -> None:
        if self.population < 1:
            raise ValueError(f"population must be >= 1, got {self.population}")
        if self.generations < 0:
            raise ValueError(f"generations must be >= 0, got {self.generations}")
        if self.candidates < self.offspring:
            raise ValueError(
                f"candidates ({self.candidates}) must be >= offspring ({self.offspring})"
            )
        if self.offspring < 1 or self.offspring > self.population:
            raise ValueError(
                f"offspring ({self.offspring}) must be in 1..population ({self.population})"
            )
        if self.archive_generations < 1:
            raise ValueError(
                f"archive_generations must be >= 1, got {self.archive_generations}"
            )
        if self.archive_update not in ARCHIVE_POLICIES:
            raise ValueError(
                f"unknown archive_update {self.archive_update!r}; "
                f"valid: {', '.join(ARCHIVE_POLICIES)}"
            )
        if self.survivor_rule not in SURVIVOR_RULES:
            raise ValueError(
                f"unknown survivor_rule {self.survivor_rule!r}; "
                f"valid: {', '.join(SURVIVOR_RULES)}"
            )
        if self.clusters is not None and not 1 <= self.clusters <= self.archive_capacity:
            raise ValueError(
                f"clusters ({self.clusters}) must be in 1..archive capacity "
                f"({self.archive_capacity})"
            )
        CrossoverSpec(self.crossover, self.alpha, self.epsilon)  # validates

    @property
    def archive_capacity(self) -> int:
        return self.archive_generations * self.offspring

    @property
    def n_clusters(self) -> int:
        return self.archive_capacity // 2 if self.clusters is None else self.clusters

    def crossover_spec(self) -> CrossoverSpec:
        return CrossoverSpec(self.crossover, self.alpha, self.epsilon)

    def with_seed(self, seed: int) -> "RunConfig":
        return replace(self, seed=seed)


@dataclass
class GAState:
    """Mutable per-run state advanced by ga_generation."""

    population: list[Individual]
    archive: Archive | None
    model: ClusterModel | None
    scores: np.ndarray | None
    generation: int
    counter: EvalCounter
    elite: Individual  # best individual seen so far


@dataclass(frozen=True)
class TraceRow:
    generation: int
    best_fitness: float
    mean_fitness: float
    fe_count: int


@dataclass
class RunTrace:
    """Per-generation telemetry plus the final-generation elite."""

    config: RunConfig
    rows: list[TraceRow]
    elite_genes: np.ndarray
    elite_fitness: float

    @property
    def final_fe_count(self) -> int:
        return self.rows[-1].fe_count


def roulette(scores: np.ndarray, rng: np.random.Generator) -> int:
    """Spin once: index i wins with probability scores[i] / sum(scores)."""
    s = np.asarray(scores, dtype=float)
    if s.ndim != 1 or s.size == 0:
        raise ValueError("scores must be a nonempty 1-D vector")
    if np.any(s < 0):
        raise ValueError("scores must be nonnegative")
    total = s.sum()
    if total <= 0:
        raise ValueError("roulette needs at least one positive score")
    cum = np.cumsum(s / total)
    u = rng.random()
    return int(min(np.searchsorted(cum, u, side="right"), s.size - 1))


def _restricted_probs(scores: np.ndarray, available: list[int]) -> np.ndarray:
    """Selection distribution over the clusters that still hold candidates.

    Renormalizes the scores of the available clusters; if every one of them
    has zero score the distribution falls back to uniform so selection stays
    well defined.
    """
    weights = np.asarray(scores, dtype=float)[available]
    total = weights.sum()
    if total > 0:
        return weights / total
    return np.full(len(available), 1.0 / len(available))


def shx_select(
    candidates: list[Individual],
    model: ClusterModel,
    scores: np.ndarray,
    n_off: int,
    rng: np.random.Generator,
) -> list[Individual]:
    """Narrow the candidate pool to n_off offspring by cluster-score roulette.

    Each candidate is labeled with its nearest centroid; each pick spins the
    roulette over clusters that still hold unselected candidates (scores
    renormalized) and then draws uniformly inside the winning cluster.  No
    candidate is evaluated and none is picked twice.
    """
    if n_off > len(candidates):
        raise ValueError(f"cannot select {n_off} from {len(candidates)} candidates")
    labels = assign_clusters(model, np.stack([c.genes for c in candidates]))
    pools: dict[int, list[int]] = {}
    for i, lab in enumerate(labels):
        pools.setdefault(int(lab), []).append(i)

    selected: list[Individual] = []
    for _ in range(n_off):
        available = sorted(cid for cid, pool in pools.items() if pool)
        probs = _restricted_probs(scores, available)
        cid = available[roulette(probs, rng)]
        pool = pools[cid]
        pick = int(rng.integers(len(pool)))
        selected.append(candidates[pool.pop(pick)])
    return selected


def survivor_select(
    population: list[Individual],
    offspring: list[Individual],
    rule: str = "truncation",
) -> tuple[list[Individual], list[Individual]]:
    """Form the next population and report which offspring were accepted.

    truncation: keep the |population| lowest-fitness individuals of
    population + offspring (fitness ties prefer incumbents, then earlier
    insertion).  replace_worst: drop the worst |offspring| incumbents and
    accept every offspring.  The returned survivors list preserves offspring
    order; the new population is sorted by fitness ascending.
    """
    for ind in population + offspring:
        if ind.fitness is None:
            raise ValueError("survivor selection requires evaluated individuals")
    mu = len(population)
    if rule == "truncation":
        ranked = sorted(population + offspring, key=lambda ind: ind.fitness)
        new_pop = ranked[:mu]
        kept = {id(ind) for ind in new_pop}
        p_sur = [ind for ind in offspring if id(ind) in kept]
    elif rule == "replace_worst":
        ranked = sorted(population, key=lambda ind: ind.fitness)
        new_pop = sorted(
            ranked[: mu - len(offspring)] + offspring, key=lambda ind: ind.fitness
        )
        p_sur = list(offspring)
    else:
        raise ValueError(f"unknown survivor rule {rule!r}")
    return new_pop, p_sur


def _refresh_history(
    state: GAState, config: RunConfig, p_sur: list[Individual], rng: np.random.Generator
) -> None:
    if not p_sur:
        return
    batch = np.stack([ind.genes for ind in p_sur])
    if config.archive_update == "random":
        update_random(state.archive, batch, rng)
    else:
        update_sequential(state.archive, batch)
    state.model = kmeans_fit(
        state.archive.genes,
        config.n_clusters,
        init_centroids=state.model.centroids,
        max_iters=config.kmeans_max_iters,
        tol=config.kmeans_tol,
    )
    state.scores = compute_scores(state.model, state.archive.size)


def ga_generation(
    state: GAState,
    config: RunConfig,
    objective: Objective,
    rng: np.random.Generator,
) -> GAState:
    """Advance the state by one generation (in place).

    Exactly ``config.offspring`` objective calls happen per generation in
    both modes; candidates filtered out are never evaluated.  Archive and
    cluster maintenance only runs in history-driven mode, where the scores
    are actually consumed.
    """
    spec = config.crossover_spec()
    bounds = objective.bounds
    if config.shx:
        cands = generate_candidates(
            state.population, spec, config.candidates, bounds, rng,
            fresh_parents=config.fresh_parents,
        )
        offspring = shx_select(cands, state.model, state.scores, config.offspring, rng)
    else:
        offspring = generate_candidates(
            state.population, spec, config.offspring, bounds, rng,
            fresh_parents=config.fresh_parents,
        )

    for ind in offspring:
        evaluate(ind, objective, state.counter)

    state.population, p_sur = survivor_select(
        state.population, offspring, config.survivor_rule
    )
    if config.shx:
        _refresh_history(state, config, p_sur, rng)

    state.generation += 1
    best = min(state.population, key=lambda ind: ind.fitness)
    if best.fitness < state.elite.fitness:
        state.elite = best
    return state


def _trace_row(state: GAState) -> TraceRow:
    fits = [ind.fitness for ind in state.population]
    return TraceRow(
        state.generation, min(fits), float(np.mean(fits)), state.counter.count
    )


def run(config: RunConfig) -> RunTrace:
    """Execute one seeded run and return its telemetry.

    Initializes population (and, in history-driven mode, the archive and its
    clustering) uniformly in the box, evaluates the population, then advances
    ``config.generations`` generations.  Total objective calls are
    population + generations * offspring regardless of mode.
    """
    objective = make_objective(config.function, config.dim)
    rng = make_rng(config.seed)
    counter = EvalCounter()

    pop_genes = rng.uniform(
        objective.lower, objective.upper, size=(config.population, config.dim)
    )
    population = [Individual(g) for g in pop_genes]
    for ind in population:
        evaluate(ind, objective, counter)

    archive = model = scores = None
    if config.shx:
        archive = init_archive(config.archive_capacity, objective.bounds, rng)
        model = kmeans_fit(
            archive.genes,
            config.n_clusters,
            rng=rng,
            max_iters=config.kmeans_max_iters,
            tol=config.kmeans_tol,
        )
        scores = compute_scores(model, archive.size)

    elite = min(population, key=lambda ind: ind.fitness)
    state = GAState(population, archive, model, scores, 0, counter, elite)

    rows = [_trace_row(state)]
    for _ in range(config.generations):
        ga_generation(state, config, objective, rng)
        rows.append(_trace_row(state))

    final_best = min(state.population, key=lambda ind: ind.fitness)
    return RunTrace(config, rows, final_best.genes, final_best.fitness)
