#!/usr/bin/env python3
"""Scaled latency comparison: 100k articles, two months of intraday bars.

Measures Q1 (news search), Q2 (news-to-bars join) and Q5 (sector peers) on
each engine in turn, printing the median latencies and the orderings the
engines' storage paradigms produce:

* full-text: traversal+index beats both the relational scan and the
  scatter/gather pipeline
* joins: index-free adjacency beats the hash-join scan, which beats the
  one-sub-query-per-hit client-side join by a wide margin
"""

import argparse
import gc
import sys
import time

from esgbench.bench import BenchConfig, aggregate, measure_load, time_query
from esgbench.engines import make_engine
from esgbench.ingest import GeneratorConfig, generate
from esgbench.workload import QuerySpec

QUERIES = ("Q1", "Q2", "Q5")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--news", type=int, default=100_000)
    parser.add_argument("--days", type=int, default=60)
    parser.add_argument("--reps", type=int, default=9)
    parser.add_argument("--esg-fraction", type=float, default=0.01)
    args = parser.parse_args()

    t0 = time.perf_counter()
    dataset = generate(
        GeneratorConfig(
            seed=42, n_stocks=50, n_sectors=5, n_news=args.news, days=args.days,
            bars_per_day=8, esg_fraction=args.esg_fraction,
        )
    )
    print(f"dataset: {len(dataset.news)} news, {len(dataset.bars)} bars "
          f"({time.perf_counter() - t0:.1f}s)")

    spec = QuerySpec(k=10)
    config = BenchConfig(warmups=2, repetitions=args.reps)
    medians: dict[tuple[str, str], float] = {}
    for name in ("relational", "document", "graph"):
        engine = make_engine(name)
        load_ms = measure_load(engine, dataset)
        row = [f"{name:<10} load={load_ms:8.1f}ms"]
        for query_id in QUERIES:
            cell = aggregate(time_query(engine, query_id, spec, config))
            medians[(name, query_id)] = cell.median_wall_ms
            row.append(f"{query_id}={cell.median_wall_ms:9.3f}ms")
        print("  ".join(row))
        del engine
        gc.collect()

    print()
    for query_id in QUERIES:
        order = sorted((medians[(n, query_id)], n) for n in ("relational", "document", "graph"))
        print(f"{query_id}: " + " < ".join(f"{n} ({ms:.3f}ms)" for ms, n in order))
    ratio = medians[("document", "Q2")] / medians[("graph", "Q2")]
    print(f"document/graph ratio on Q2: {ratio:.0f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
