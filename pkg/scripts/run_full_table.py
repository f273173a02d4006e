#!/usr/bin/env python3
"""Run the default comparison grid (4 functions x 6 variants x 10 seeds)
and print the method comparison report.

Usage: python scripts/run_full_table.py [--out DIR] [--workers N] [--seed S]
"""

import argparse
import sys
import time

from shxga.harness import ExperimentPlan, run_experiment, write_report


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/full_table")
    ap.add_argument("--workers", type=int, default=2)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    plan = ExperimentPlan(base_seed=args.seed)
    started = time.perf_counter()
    outcomes = run_experiment(plan, args.out, workers=args.workers)
    failures = [o for o in outcomes if o.error]
    for o in failures:
        print(f"FAILED {o.function}/{o.variant} seed {o.seed}: {o.error}", file=sys.stderr)
    print(f"{len(outcomes) - len(failures)}/{len(outcomes)} runs in "
          f"{time.perf_counter() - started:.0f}s -> {args.out}\n")
    print(write_report(args.out))
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
