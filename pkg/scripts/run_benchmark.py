#!/usr/bin/env python3
"""Desk-scale benchmark: verify the three engines agree, then measure them.

Uses the default synthetic dataset (50 stocks, 10k articles, 42 trading
days). Writes bench.csv / bench.md / per-metric TSVs to the output
directory.
"""

import argparse
import sys
import time

from esgbench.bench import BenchConfig, emit_report, run_matrix
from esgbench.ingest import GeneratorConfig, generate
from esgbench.workload import QuerySpec, verify_engines


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--reps", type=int, default=15)
    parser.add_argument("--warmups", type=int, default=2)
    parser.add_argument("--out", default="bench-out")
    args = parser.parse_args()

    t0 = time.perf_counter()
    dataset = generate(GeneratorConfig(seed=args.seed))
    print(f"dataset ready in {time.perf_counter() - t0:.1f}s "
          f"({len(dataset.news)} news, {len(dataset.bars)} bars)")

    report = verify_engines(dataset)
    print(report.summary())
    if not report.ok:
        print("engines diverge; not benchmarking")
        return 1

    config = BenchConfig(warmups=args.warmups, repetitions=args.reps)
    bench_report, echo = run_matrix(dataset, QuerySpec(), config)
    paths = emit_report(bench_report, args.out, q1_echo=echo)
    for kind, path in paths.items():
        print(f"{kind}: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
