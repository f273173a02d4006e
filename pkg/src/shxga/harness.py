"""Batch experiment runner: plan files, seeded grids, CSV traces, summaries.

Config files are flat ``key = value`` text with ``#`` comments.  A file with a
``function`` key describes a single run; otherwise it describes an experiment
plan (grid of functions x method variants x seeded runs).  An empty file is
the full default plan.

Outputs per plan directory:

- ``trace_<function>_<variant>_<seed>.csv`` with header
  ``generation,best_fitness,mean_fitness,fe_count``
- ``summary.csv`` with header ``function,variant,mean,stddev,runs``
  (recomputed from the trace files, so the two always agree exactly)

All floats are serialized as ``%.10E``; rewriting a parsed file reproduces it
byte for byte.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .benchmarks import FUNCTION_NAMES
from .engine import RunConfig, RunTrace, run

FLOAT_FMT = "%.10E"

# variant -> (crossover, shx, archive_update); None keeps the config default
VARIANTS: dict[str, tuple[str, bool, str | None]] = {
    "BLX": ("blx", False, None),
    "SH-BLX_random": ("blx", True, "random"),
    "SH-BLX_sequential": ("blx", True, "sequential"),
    "SPX": ("spx", False, None),
    "SH-SPX_random": ("spx", True, "random"),
    "SH-SPX_sequential": ("spx", True, "sequential"),
}
VARIANT_NAMES: tuple[str, ...] = tuple(VARIANTS)
_VARIANT_LOOKUP = {name.lower(): name for name in VARIANTS}


class ConfigError(ValueError):
    """Malformed or inconsistent configuration file."""


@dataclass
class ExperimentPlan:
    """Grid of (function, variant) cells, each run ``runs`` times.

    Run r of every cell uses seed ``base_seed + r``, so paired cells share
    initial conditions.
    """

    functions: list[str] = field(default_factory=lambda: list(FUNCTION_NAMES))
    variants: list[str] = field(default_factory=lambda: list(VARIANT_NAMES))
    runs: int = 10
    base_seed: int = 0
    out: str = "results"
    base: RunConfig = field(default_factory=RunConfig)

    def __post_init__(self) -> None:
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs}")
        if not self.functions:
            raise ValueError("functions must not be empty")
        if not self.variants:
            raise ValueError("variants must not be empty")

    def cell_config(self, function: str, variant: str, run_index: int) -> RunConfig:
        crossover, shx, update = VARIANTS[variant]
        return replace(
            self.base,
            function=function,
            crossover=crossover,
            shx=shx,
            archive_update=update if update is not None else self.base.archive_update,
            seed=self.base_seed + run_index,
        )

    def cells(self) -> list[tuple[str, str]]:
        return [(f, v) for f in self.functions for v in self.variants]


@dataclass(frozen=True)
class SummaryRow:
    function: str
    variant: str
    mean: float
    stddev: float  # sample (n-1) deviation; 0.0 for a single run
    runs: int


@dataclass
class RunOutcome:
    function: str
    variant: str
    seed: int
    path: str | None
    error: str | None = None
    io_error: bool = False


def variant_label(config: RunConfig) -> str:
    """Canonical method-variant name for a run configuration."""
    base = config.crossover.upper()
    if not config.shx:
        return base
    return f"SH-{base}_{config.archive_update}"


# --- config file parsing ----------------------------------------------------

_RUN_ONLY = ("function", "crossover", "shx", "archive_update", "seed")
_PLAN_ONLY = ("functions", "variants", "runs", "base_seed", "out")
_SHARED = (
    "dim",
    "population",
    "generations",
    "candidates",
    "offspring",
    "alpha",
    "epsilon",
    "fresh_parents",
    "archive_generations",
    "clusters",
    "survivor_rule",
    "kmeans_tol",
    "kmeans_max_iters",
)
_INT_KEYS = {
    "dim",
    "population",
    "generations",
    "candidates",
    "offspring",
    "archive_generations",
    "kmeans_max_iters",
    "seed",
    "runs",
    "base_seed",
}
_FLOAT_KEYS = {"alpha", "kmeans_tol"}
_AUTO_KEYS = {"epsilon": float, "clusters": int}  # accept "auto" -> None
_BOOL_KEYS = {"shx", "fresh_parents"}
_LIST_KEYS = {"functions", "variants"}


def _parse_value(key: str, raw: str, where: str):
    if key in _INT_KEYS:
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"{where}: key {key!r} expects an integer, got {raw!r}") from None
    if key in _FLOAT_KEYS:
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"{where}: key {key!r} expects a number, got {raw!r}") from None
    if key in _AUTO_KEYS:
        if raw.lower() == "auto":
            return None
        try:
            return _AUTO_KEYS[key](raw)
        except ValueError:
            raise ConfigError(
                f"{where}: key {key!r} expects a number or 'auto', got {raw!r}"
            ) from None
    if key in _BOOL_KEYS:
        if raw.lower() in ("true", "false"):
            return raw.lower() == "true"
        raise ConfigError(f"{where}: key {key!r} expects true or false, got {raw!r}")
    if key in _LIST_KEYS:
        items = [item.strip() for item in raw.split(",") if item.strip()]
        if not items:
            raise ConfigError(f"{where}: key {key!r} expects a comma-separated list")
        return items
    return raw


def _check_names(key: str, names, valid, line_of) -> list[str]:
    checked = []
    for name in names:
        canonical = valid.get(name.lower())
        if canonical is None:
            raise ConfigError(
                f"{line_of(key)}: unknown name {name!r} for {key!r}; "
                f"valid names: {', '.join(valid.values())}"
            )
        checked.append(canonical)
    return checked


def parse_config(path) -> RunConfig | ExperimentPlan:
    """Parse a flat key=value config file into a run or plan description.

    Every diagnostic names the offending key and its file:line location.
    """
    path = Path(path)
    entries: dict[str, tuple[str, int]] = {}
    for line_no, raw_line in enumerate(path.read_text().splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"{path}:{line_no}: expected 'key = value', got {raw_line!r}")
        if key in entries:
            raise ConfigError(
                f"{path}:{line_no}: duplicate key {key!r} (first set on line {entries[key][1]})"
            )
        entries[key] = (value, line_no)

    def line_of(key: str) -> str:
        return f"{path}:{entries[key][1]}"

    known = set(_RUN_ONLY) | set(_PLAN_ONLY) | set(_SHARED)
    for key in entries:
        if key not in known:
            raise ConfigError(
                f"{line_of(key)}: unknown key {key!r}; valid keys: {', '.join(sorted(known))}"
            )

    values = {k: _parse_value(k, v, f"{path}:{n}") for k, (v, n) in entries.items()}
    single = "function" in entries

    forbidden = _PLAN_ONLY if single else _RUN_ONLY
    mode = "single-run" if single else "plan"
    for key in forbidden:
        if key in entries:
            raise ConfigError(
                f"{line_of(key)}: key {key!r} is not valid in a {mode} config"
            )

    function_lookup = {n.lower(): n for n in FUNCTION_NAMES}
    try:
        if single:
            values["function"] = _check_names(
                "function", [values["function"]], function_lookup, line_of
            )[0]
            return RunConfig(**values)
        functions = values.pop("functions", list(FUNCTION_NAMES))
        if "functions" in entries:
            functions = _check_names("functions", functions, function_lookup, line_of)
        variants = values.pop("variants", list(VARIANT_NAMES))
        if "variants" in entries:
            variants = _check_names("variants", variants, _VARIANT_LOOKUP, line_of)
        plan_kwargs = {
            "functions": functions,
            "variants": variants,
            "runs": values.pop("runs", 10),
            "base_seed": values.pop("base_seed", 0),
            "out": values.pop("out", "results"),
        }
        return ExperimentPlan(base=RunConfig(**values), **plan_kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        hints = "".join(
            f" [{key!r} set at line {entries[key][1]}]"
            for key in entries
            if key in str(exc)
        )
        raise ConfigError(f"{path}: {exc}{hints}") from exc


# --- trace and summary I/O ---------------------------------------------------

def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def trace_filename(function: str, variant: str, seed: int) -> str:
    return f"trace_{function}_{variant}_{seed}.csv"


def _trace_text(trace: RunTrace) -> str:
    lines = ["generation,best_fitness,mean_fitness,fe_count"]
    for row in trace.rows:
        lines.append(
            f"{row.generation},{FLOAT_FMT % row.best_fitness},"
            f"{FLOAT_FMT % row.mean_fitness},{row.fe_count}"
        )
    return "\n".join(lines) + "\n"


def write_trace(trace: RunTrace, out_dir: Path, variant: str) -> Path:
    path = Path(out_dir) / trace_filename(trace.config.function, variant, trace.config.seed)
    _atomic_write(path, _trace_text(trace))
    return path


def parse_trace_filename(name: str) -> tuple[str, str, int]:
    stem = name.removeprefix("trace_").removesuffix(".csv")
    function, _, rest = stem.partition("_")
    variant, _, seed = rest.rpartition("_")
    return function, variant, int(seed)


def read_trace(path) -> list[tuple[int, float, float, int]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return [
            (
                int(r["generation"]),
                float(r["best_fitness"]),
                float(r["mean_fitness"]),
                int(r["fe_count"]),
            )
            for r in reader
        ]


def _order_key(function: str, variant: str) -> tuple:
    f_rank = FUNCTION_NAMES.index(function) if function in FUNCTION_NAMES else len(FUNCTION_NAMES)
    v_rank = (
        VARIANT_NAMES.index(variant) if variant in VARIANT_NAMES else len(VARIANT_NAMES)
    )
    return f_rank, function, v_rank, variant


def summarize(out_dir) -> list[SummaryRow]:
    """Recompute the per-cell summary from the trace files and write summary.csv."""
    out_dir = Path(out_dir)
    finals: dict[tuple[str, str], list[float]] = {}
    for path in sorted(out_dir.glob("trace_*.csv")):
        function, variant, _ = parse_trace_filename(path.name)
        rows = read_trace(path)
        if not rows:
            continue
        finals.setdefault((function, variant), []).append(rows[-1][1])

    summary = []
    for function, variant in sorted(finals, key=lambda fv: _order_key(*fv)):
        values = finals[(function, variant)]
        mean = float(np.mean(values))
        std = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
        summary.append(SummaryRow(function, variant, mean, std, len(values)))

    lines = ["function,variant,mean,stddev,runs"]
    for row in summary:
        lines.append(
            f"{row.function},{row.variant},{FLOAT_FMT % row.mean},"
            f"{FLOAT_FMT % row.stddev},{row.runs}"
        )
    _atomic_write(out_dir / "summary.csv", "\n".join(lines) + "\n")
    return summary


def read_summary(out_dir) -> list[SummaryRow]:
    with open(Path(out_dir) / "summary.csv", newline="") as fh:
        return [
            SummaryRow(
                r["function"], r["variant"], float(r["mean"]), float(r["stddev"]),
                int(r["runs"]),
            )
            for r in csv.DictReader(fh)
        ]


# --- experiment execution ----------------------------------------------------

def _execute_cell_run(task: tuple[RunConfig, str, str]) -> RunOutcome:
    config, variant, out_dir = task
    try:
        trace = run(config)
        path = write_trace(trace, Path(out_dir), variant)
        return RunOutcome(config.function, variant, config.seed, str(path))
    except OSError as exc:
        return RunOutcome(
            config.function, variant, config.seed, None, f"I/O error: {exc}", True
        )
    except Exception as exc:  # noqa: BLE001 - isolate per-run failures
        return RunOutcome(config.function, variant, config.seed, None, str(exc))


def run_experiment(
    plan: ExperimentPlan, out_dir=None, workers: int = 1
) -> list[RunOutcome]:
    """Execute every (cell, seed) of the plan and write traces plus summary.

    An I/O failure aborts the rest of its cell; any other per-run failure is
    recorded and the remaining runs continue.  The summary covers whatever
    traces were produced.  Outputs are deterministic for a fixed plan and
    base seed, independent of ``workers``.
    """
    out_dir = Path(out_dir if out_dir is not None else plan.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    tasks = [
        (plan.cell_config(function, variant, r), variant, str(out_dir))
        for function, variant in plan.cells()
        for r in range(plan.runs)
    ]
    outcomes: list[RunOutcome] = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_execute_cell_run, tasks))
    else:
        aborted: set[tuple[str, str]] = set()
        for task in tasks:
            config, variant, _ = task
            cell = (config.function, variant)
            if cell in aborted:
                outcomes.append(
                    RunOutcome(
                        config.function, variant, config.seed, None,
                        "cell aborted after I/O error", True,
                    )
                )
                continue
            outcome = _execute_cell_run(task)
            if outcome.io_error:
                aborted.add(cell)
            outcomes.append(outcome)
    summarize(out_dir)
    return outcomes


def run_single(config: RunConfig, out_dir) -> RunOutcome:
    """Execute one configured run, writing its trace and a one-row summary."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outcome = _execute_cell_run((config, variant_label(config), str(out_dir)))
    summarize(out_dir)
    return outcome


# --- comparison report ---------------------------------------------------------

def _fmt(x: float) -> str:
    return "%.6E" % x


def _ratio(baseline: float, value: float) -> str:
    if value == 0.0:
        return "inf" if baseline > 0 else "1.00"
    return f"{baseline / value:.2f}"


def compare_report(summary: list[SummaryRow]) -> str:
    """Readable baseline-vs-history comparison per function and operator family.

    For each family prints the baseline mean, each history-driven variant's
    mean and improvement ratio (baseline / variant, higher is better), and
    flags the best variant per family.  Ends with the sequential-vs-random
    win count over the history-driven cells.  Missing cells are listed, never
    fatal.
    """
    by_cell = {(s.function, s.variant): s for s in summary}
    functions = sorted({s.function for s in summary}, key=lambda f: _order_key(f, "")[:2])
    lines = ["method comparison (mean final-generation elite, lower is better)", ""]
    missing: list[str] = []
    seq_wins = random_wins = ties = 0

    for function in functions:
        lines.append(f"{function}:")
        for family in ("BLX", "SPX"):
            members = [family, f"SH-{family}_random", f"SH-{family}_sequential"]
            present = {v: by_cell[(function, v)] for v in members if (function, v) in by_cell}
            missing.extend(f"{function}/{v}" for v in members if v not in present)
            if not present:
                continue
            base = present.get(family)
            best = min(present.values(), key=lambda s: s.mean)
            header = f"  {family} family"
            if base is not None:
                header += f" (baseline {_fmt(base.mean)} +- {_fmt(base.stddev)})"
            lines.append(header)
            for v in members[1:]:
                s = present.get(v)
                if s is None:
                    continue
                entry = f"    {v:<22} {_fmt(s.mean)} +- {_fmt(s.stddev)}"
                if base is not None:
                    entry += f"  ratio {_ratio(base.mean, s.mean)}x"
                    if s.mean == base.mean:
                        entry += " (tie)"
                lines.append(entry)
            lines.append(f"    best in family: {best.variant}")
            seq = present.get(f"SH-{family}_sequential")
            rnd = present.get(f"SH-{family}_random")
            if seq is not None and rnd is not None:
                if seq.mean < rnd.mean:
                    seq_wins += 1
                elif rnd.mean < seq.mean:
                    random_wins += 1
                else:
                    ties += 1
        lines.append("")

    lines.append(
        f"sequential vs random archive update: sequential wins {seq_wins}, "
        f"random wins {random_wins}, ties {ties} "
        f"(of {seq_wins + random_wins + ties} comparable cells)"
    )
    if missing:
        lines.append("missing cells: " + ", ".join(missing))
    return "\n".join(lines) + "\n"


def write_report(out_dir) -> str:
    """Build the comparison report for a results directory and save report.txt."""
    out_dir = Path(out_dir)
    summary_path = out_dir / "summary.csv"
    summary = read_summary(out_dir) if summary_path.exists() else summarize(out_dir)
    text = compare_report(summary)
    _atomic_write(out_dir / "report.txt", text)
    return text
