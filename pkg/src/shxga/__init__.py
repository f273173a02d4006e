"""Real-coded genetic algorithm with search-history-driven offspring selection.

Survivors of past generations are archived, clustered by k-means, and the
normalized cluster sizes drive a roulette that filters an over-generated
candidate pool down to the offspring that actually get evaluated, so the
history biases the search at zero extra objective calls.
"""

from .benchmarks import FUNCTION_NAMES, Objective, make_objective
from .core import EvalCounter, Individual, evaluate, make_rng
from .engine import (
    GAState,
    RunConfig,
    RunTrace,
    TraceRow,
    ga_generation,
    roulette,
    run,
    shx_select,
    survivor_select,
)
from .harness import (
    VARIANT_NAMES,
    ConfigError,
    ExperimentPlan,
    SummaryRow,
    compare_report,
    parse_config,
    run_experiment,
    summarize,
)
from .history import (
    Archive,
    ClusterModel,
    compute_scores,
    init_archive,
    kmeans_fit,
    nearest_cluster,
    update_random,
    update_sequential,
)
from .operators import CrossoverSpec, blx_alpha, generate_candidates, sample_parents, spx

__all__ = [
    "Archive",
    "ClusterModel",
    "ConfigError",
    "CrossoverSpec",
    "EvalCounter",
    "ExperimentPlan",
    "FUNCTION_NAMES",
    "GAState",
    "Individual",
    "Objective",
    "RunConfig",
    "RunTrace",
    "SummaryRow",
    "TraceRow",
    "VARIANT_NAMES",
    "blx_alpha",
    "compare_report",
    "compute_scores",
    "evaluate",
    "ga_generation",
    "generate_candidates",
    "init_archive",
    "kmeans_fit",
    "make_objective",
    "make_rng",
    "nearest_cluster",
    "parse_config",
    "roulette",
    "run",
    "run_experiment",
    "sample_parents",
    "shx_select",
    "spx",
    "summarize",
    "survivor_select",
    "update_random",
    "update_sequential",
]
