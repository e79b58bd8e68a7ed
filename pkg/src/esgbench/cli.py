"""Command-line entry point.

Subcommands:

    gen      write a synthetic dataset to a directory
    ingest   load and validate a dataset, print the validation report
    verify   run the workload on all engines and check cross-engine
             equivalence (exit 1 on divergence)
    bench    measure the full engine x query matrix and write reports
    query    run one query on one engine and print the rows
    report   re-render markdown/TSV outputs from an existing bench.csv

Exit codes: 0 ok, 1 divergence or runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import BenchConfig, emit_report, read_report_csv, run_matrix
from .engines import ENGINE_NAMES, make_engine
from .ingest import GeneratorConfig, generate, load_dataset, write_dataset
from .model import Dataset, EsgLexicon, ResultSet
from .workload import QUERY_IDS, QuerySpec, verify_engines


def _add_generator_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=42, help="generator seed")
    parser.add_argument("--stocks", type=int, default=50)
    parser.add_argument("--sectors", type=int, default=5)
    parser.add_argument("--news", type=int, default=10_000)
    parser.add_argument("--days", type=int, default=42)
    parser.add_argument("--bars-per-day", type=int, default=8)
    parser.add_argument("--esg-fraction", type=float, default=0.02)


def _add_dataset_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--data", type=Path, default=None, help="dataset directory; omit to generate synthetically")
    _add_generator_args(parser)


def _add_lexicon_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--lexicon", default=None, help="comma-separated ESG terms (default: built-in list)")


def _generator_config(args: argparse.Namespace) -> GeneratorConfig:
    return GeneratorConfig(
        seed=args.seed,
        n_stocks=args.stocks,
        n_sectors=args.sectors,
        n_news=args.news,
        days=args.days,
        bars_per_day=args.bars_per_day,
        esg_fraction=args.esg_fraction,
    )


def _resolve_dataset(args: argparse.Namespace) -> Dataset:
    if args.data is not None:
        report = load_dataset(args.data)
        if report.rejections:
            print(f"note: {len(report.rejections)} records rejected during load", file=sys.stderr)
        return report.dataset
    return generate(_generator_config(args))


def _resolve_lexicon(args: argparse.Namespace) -> EsgLexicon:
    if getattr(args, "lexicon", None):
        return EsgLexicon(frozenset(t.strip() for t in args.lexicon.split(",") if t.strip()))
    return EsgLexicon.default()


def _engine_list(args: argparse.Namespace) -> tuple[str, ...]:
    names = tuple(n.strip() for n in args.engines.split(",") if n.strip())
    for name in names:
        if name not in ENGINE_NAMES:
            raise ValueError(f"unknown engine {name!r}; choose from {', '.join(ENGINE_NAMES)}")
    return names


def _print_result(result: ResultSet) -> None:
    if result.query_id == "Q1":
        print("stock\tdate\tmedia\tscore")
        for hit in result.rows:
            print(f"{hit.symbol}\t{hit.date.isoformat(sep=' ')}\t{hit.media}\t{hit.score:.6f}")
    else:
        print("symbol\ttimestamp\topen\thigh\tlow\tclose\tvolume")
        for symbol, bar in result.rows:
            print(
                f"{symbol}\t{bar.timestamp.isoformat(sep=' ')}\t{bar.open}\t{bar.high}"
                f"\t{bar.low}\t{bar.close}\t{bar.volume}"
            )
    print(f"# {len(result.rows)} rows")


def _cmd_gen(args: argparse.Namespace) -> int:
    dataset = generate(_generator_config(args))
    paths = write_dataset(dataset, args.out)
    print(
        f"wrote {len(dataset.stocks)} stocks, {len(dataset.sectors)} sectors, "
        f"{len(dataset.news)} news, {len(dataset.bars)} bars"
    )
    for path in paths:
        print(f"  {path}")
    return 0


def _cmd_ingest(args: argparse.Namespace) -> int:
    report = load_dataset(args.data)
    print(report.summary())
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    dataset = _resolve_dataset(args)
    report = verify_engines(
        dataset,
        lexicon=_resolve_lexicon(args),
        engine_names=_engine_list(args),
        shard_count=args.shards,
    )
    print(report.summary())
    return 0 if report.ok else 1


def _cmd_bench(args: argparse.Namespace) -> int:
    dataset = _resolve_dataset(args)
    engines = _engine_list(args)
    lexicon = _resolve_lexicon(args)
    if args.force:
        print("skipping cross-engine verification (--force)")
    else:
        vreport = verify_engines(dataset, lexicon=lexicon, engine_names=engines, shard_count=args.shards)
        if not vreport.ok:
            print(vreport.summary())
            print("engines diverge; refusing to benchmark (use --force to override)")
            return 1
        print(vreport.summary())
    spec = QuerySpec(lexicon=lexicon, k=args.k)
    config = BenchConfig(warmups=args.warmups, repetitions=args.reps, engines=engines)
    report, echo = run_matrix(dataset, spec, config, shard_count=args.shards)
    paths = emit_report(report, args.out, q1_echo=echo)
    for kind, path in paths.items():
        print(f"{kind}: {path}")
    return 0


def _cmd_query(args: argparse.Namespace) -> int:
    dataset = _resolve_dataset(args)
    engine = make_engine(args.engine, shard_count=args.shards)
    engine.load(dataset)
    spec = QuerySpec(lexicon=_resolve_lexicon(args), k=args.k)
    _print_result(engine.run_query(args.query, spec))
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    report = read_report_csv(args.csv)
    paths = emit_report(report, args.out)
    for kind, path in paths.items():
        print(f"{kind}: {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="esgbench",
        description="Embedded relational/document/graph storage benchmark over stock and ESG news data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a synthetic dataset")
    _add_generator_args(p)
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("ingest", help="load and validate a dataset directory")
    p.add_argument("--data", type=Path, required=True)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("verify", help="check cross-engine equivalence")
    _add_dataset_args(p)
    _add_lexicon_arg(p)
    p.add_argument("--engines", default=",".join(ENGINE_NAMES))
    p.add_argument("--shards", type=int, default=1, help="document engine shard count")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("bench", help="run the benchmark matrix")
    _add_dataset_args(p)
    _add_lexicon_arg(p)
    p.add_argument("--engines", default=",".join(ENGINE_NAMES))
    p.add_argument("--shards", type=int, default=1)
    p.add_argument("--reps", type=int, default=30, help="measured repetitions per query")
    p.add_argument("--warmups", type=int, default=3)
    p.add_argument("--k", type=int, default=10, help="Q1 top-k document count")
    p.add_argument("--out", type=Path, default=Path("bench-out"))
    p.add_argument("--force", action="store_true", help="benchmark even if verification fails")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("query", help="run one query on one engine")
    _add_dataset_args(p)
    _add_lexicon_arg(p)
    p.add_argument("--engine", choices=ENGINE_NAMES, required=True)
    p.add_argument("--query", choices=QUERY_IDS, required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--shards", type=int, default=1)
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("report", help="re-render reports from bench.csv")
    p.add_argument("--csv", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
