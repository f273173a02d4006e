"""Command line interface: run experiment plans, summarize, and report.

Exit code 0 means every run completed; 1 means at least one run failed;
2 means the configuration was rejected.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .engine import RunConfig
from .harness import (
    ConfigError,
    ExperimentPlan,
    parse_config,
    parse_trace_filename,
    run_experiment,
    run_single,
    summarize,
    write_report,
)

GNUPLOT_NAME = "plot_traces.gp"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shxga",
        description="Real-coded GA benchmark harness with history-driven offspring selection",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a run or plan config file")
    run_p.add_argument("--config", required=True, help="flat key=value config file")
    run_p.add_argument("--out", default=None, help="output directory (default: plan's)")
    run_p.add_argument("--workers", type=int, default=1, help="parallel runs (default 1)")
    run_p.add_argument("--seed", type=int, default=None, help="override the (base) seed")
    run_p.add_argument(
        "--gnuplot", action="store_true", help="also emit a gnuplot script for the traces"
    )

    sum_p = sub.add_parser("summarize", help="rebuild summary.csv from trace files")
    sum_p.add_argument("--out", required=True, help="results directory")

    rep_p = sub.add_parser("report", help="print the method comparison report")
    rep_p.add_argument("--out", required=True, help="results directory")
    return parser


def _emit_gnuplot(out_dir: Path) -> None:
    traces = sorted(p.name for p in out_dir.glob("trace_*.csv"))
    by_function: dict[str, list[str]] = {}
    for name in traces:
        function, variant, seed = parse_trace_filename(name)
        by_function.setdefault(function, []).append(name)
    lines = [
        "# gnuplot script: best fitness per generation, one png per function",
        "set datafile separator ','",
        "set terminal pngcairo size 1000,700",
        "set logscale y",
        "set xlabel 'generation'",
        "set ylabel 'best fitness'",
        "set key outside",
    ]
    for function, names in by_function.items():
        lines.append(f"set output '{function}.png'")
        plots = ", \\\n  ".join(
            f"'{name}' using 1:2 every ::1 with lines title '{name[6:-4]}'"
            for name in names
        )
        lines.append(f"plot {plots}")
    (out_dir / GNUPLOT_NAME).write_text("\n".join(lines) + "\n")


def _cmd_run(args) -> int:
    parsed = parse_config(args.config)
    if isinstance(parsed, ExperimentPlan):
        if args.seed is not None:
            parsed.base_seed = args.seed
        out_dir = Path(args.out) if args.out else Path(parsed.out)
        outcomes = run_experiment(parsed, out_dir, workers=max(1, args.workers))
    else:
        config: RunConfig = parsed
        if args.seed is not None:
            config = replace(config, seed=args.seed)
        out_dir = Path(args.out) if args.out else Path("results")
        outcomes = [run_single(config, out_dir)]

    failures = [o for o in outcomes if o.error]
    for o in failures:
        print(
            f"FAILED {o.function}/{o.variant} seed {o.seed}: {o.error}",
            file=sys.stderr,
        )
    print(f"{len(outcomes) - len(failures)}/{len(outcomes)} runs completed -> {out_dir}")
    if args.gnuplot:
        _emit_gnuplot(out_dir)
    return 1 if failures else 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "summarize":
            rows = summarize(args.out)
            print(f"summary.csv written ({len(rows)} cells)")
            return 0
        if args.command == "report":
            print(write_report(args.out), end="")
            return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
