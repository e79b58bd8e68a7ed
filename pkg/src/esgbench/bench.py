"""Benchmark harness: wall-clock timing, CPU/memory sampling, reports.

Each measured cell is one (engine, query) pair. Warmup runs come first and
are discarded; each repetition then times exactly one query execution with a
monotonic clock while a background poller samples process CPU and RSS at a
fixed interval. CPU percentages are normalized to whole-machine capacity so
values stay in [0, 100] on any core count.

Hit sets for Q2..Q5 are computed once, outside the timed region, so a join
cell measures the join and not a hidden Q1. Load and index-build time is
never part of a query cell; it is measured separately and reported as its
own load-phase metric.

Report outputs: a machine CSV with schema ``engine,query,metric,value``, a
markdown table with host metadata, and one plot-ready TSV per metric.
"""

from __future__ import annotations

import csv
import platform
import statistics
import threading
import time
from dataclasses import dataclass
from math import ceil
from pathlib import Path
from typing import Callable, Sequence

import psutil

from .engines import StorageEngine, make_engine
from .model import BenchSample, Dataset, ResultSet
from .workload import QUERY_IDS, QuerySpec

METRICS = ("median_wall_ms", "p95_wall_ms", "cpu_max_pct", "cpu_avg_pct", "peak_mem_mb")


@dataclass(frozen=True)
class BenchConfig:
    warmups: int = 3
    repetitions: int = 30
    sample_interval_ms: float = 50.0
    engines: tuple[str, ...] = ("relational", "document", "graph")

    def __post_init__(self) -> None:
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        if self.warmups < 0:
            raise ValueError("warmups cannot be negative")
        if self.sample_interval_ms <= 0:
            raise ValueError("sample_interval_ms must be positive")


class ResourceMonitor:
    """Background poller for process CPU percent and RSS.

    One instance covers one measured run: start(), run the query, stop().
    The final sample is taken at stop time, so even sub-interval queries get
    at least one sample.
    """

    def __init__(self, interval_s: float) -> None:
        self._interval = interval_s
        self._proc = psutil.Process()
        self._ncpu = psutil.cpu_count() or 1
        self._stop = threading.Event()
        self._thread = threading.Thread(target=self._loop, daemon=True)
        self._cpu: list[float] = []
        self._rss: list[int] = []

    def _sample(self) -> None:
        pct = self._proc.cpu_percent(interval=None) / self._ncpu
        self._cpu.append(min(100.0, max(0.0, pct)))
        self._rss.append(self._proc.memory_info().rss)

    def _loop(self) -> None:
        while not self._stop.wait(self._interval):
            self._sample()

    def start(self) -> None:
        self._proc.cpu_percent(interval=None)  # prime the per-process counter
        self._thread.start()

    def stop(self) -> tuple[float, float, float]:
        """Returns (cpu_max_pct, cpu_avg_pct, peak_mem_mb)."""
        self._stop.set()
        self._thread.join()
        self._sample()
        cpu_max = max(self._cpu)
        cpu_avg = sum(self._cpu) / len(self._cpu)
        peak_mb = max(self._rss) / (1024 * 1024)
        return cpu_max, cpu_avg, peak_mb


def _query_runner(
    engine: StorageEngine, query_id: str, spec: QuerySpec
) -> Callable[[], ResultSet]:
    """Bind one query to its inputs; Q2..Q5 hit sets are prepared untimed."""
    terms = spec.lexicon.ordered_terms
    if query_id == "Q1":
        return lambda: engine.fulltext(terms, spec.k)
    hits = engine.fulltext(terms, spec.k).rows
    if query_id == "Q2":
        return lambda: engine.join_bars(hits)
    if query_id == "Q3":
        return lambda: engine.complement_bars(hits)
    if query_id == "Q4":
        return lambda: engine.horizon_join(hits, spec.horizon_days)
    if query_id == "Q5":
        return lambda: engine.sector_peers(hits)
    raise ValueError(f"unknown query id {query_id!r}")


def time_query(
    engine: StorageEngine, query_id: str, spec: QuerySpec, config: BenchConfig
) -> list[BenchSample]:
    """Measure one (engine, query) cell; one sample per repetition."""
    run = _query_runner(engine, query_id, spec)
    for _ in range(config.warmups):
        run()
    samples: list[BenchSample] = []
    interval_s = config.sample_interval_ms / 1000.0
    for _ in range(config.repetitions):
        monitor = ResourceMonitor(interval_s)
        monitor.start()
        t0 = time.perf_counter_ns()
        run()
        wall_ms = (time.perf_counter_ns() - t0) / 1e6
        cpu_max, cpu_avg, peak_mb = monitor.stop()
        samples.append(BenchSample(engine.name, query_id, wall_ms, cpu_max, cpu_avg, peak_mb))
    return samples


def measure_load(engine: StorageEngine, dataset: Dataset) -> float:
    """Load the engine and return the load phase duration in ms."""
    t0 = time.perf_counter_ns()
    engine.load(dataset)
    return (time.perf_counter_ns() - t0) / 1e6


@dataclass(frozen=True)
class ReportCell:
    engine: str
    query_id: str
    median_wall_ms: float
    p95_wall_ms: float
    cpu_max_pct: float
    cpu_avg_pct: float
    peak_mem_mb: float


def _p95(values: Sequence[float]) -> float:
    """Nearest-rank 95th percentile; never below the median."""
    ordered = sorted(values)
    return ordered[max(0, ceil(0.95 * len(ordered)) - 1)]


def aggregate(samples: Sequence[BenchSample]) -> ReportCell:
    if not samples:
        raise ValueError("cannot aggregate zero samples")
    walls = [s.wall_ms for s in samples]
    return ReportCell(
        engine=samples[0].engine,
        query_id=samples[0].query_id,
        median_wall_ms=statistics.median(walls),
        p95_wall_ms=_p95(walls),
        cpu_max_pct=max(s.cpu_max_pct for s in samples),
        cpu_avg_pct=sum(s.cpu_avg_pct for s in samples) / len(samples),
        peak_mem_mb=max(s.peak_mem_mb for s in samples),
    )


@dataclass(frozen=True)
class BenchReport:
    cells: tuple[ReportCell, ...]
    load_ms: tuple[tuple[str, float], ...] = ()
    host: tuple[tuple[str, str], ...] = ()

    def cell(self, engine: str, query_id: str) -> ReportCell:
        for c in self.cells:
            if c.engine == engine and c.query_id == query_id:
                return c
        raise KeyError(f"no cell for ({engine}, {query_id})")

    def require_complete(self, engines: Sequence[str], query_ids: Sequence[str] = QUERY_IDS) -> None:
        """A missing (engine, query) cell is a hard error, never a silent blank."""
        have = {(c.engine, c.query_id) for c in self.cells}
        missing = [(e, q) for e in engines for q in query_ids if (e, q) not in have]
        if missing:
            raise ValueError(f"report is missing cells: {missing}")


def host_metadata() -> tuple[tuple[str, str], ...]:
    vm = psutil.virtual_memory()
    return (
        ("platform", platform.platform()),
        ("python", platform.python_version()),
        ("machine", platform.machine()),
        ("logical_cpus", str(psutil.cpu_count())),
        ("total_memory_gb", f"{vm.total / 1024 ** 3:.1f}"),
    )


def run_matrix(
    dataset: Dataset,
    spec: QuerySpec,
    config: BenchConfig,
    shard_count: int = 1,
    echo_engine: str = "graph",
    echo_k: int = 5,
) -> tuple[BenchReport, ResultSet | None]:
    """Benchmark every configured engine over all five queries.

    Engines are built, measured and released one at a time so peak memory is
    one engine's worth. Returns the report plus a small Q1 echo from
    ``echo_engine`` for the human-readable output.
    """
    cells: list[ReportCell] = []
    loads: list[tuple[str, float]] = []
    echo: ResultSet | None = None
    for name in config.engines:
        engine = make_engine(name, shard_count=shard_count)
        loads.append((name, measure_load(engine, dataset)))
        for query_id in QUERY_IDS:
            cells.append(aggregate(time_query(engine, query_id, spec, config)))
        if echo is None and (name == echo_engine or name == config.engines[-1]):
            echo = engine.fulltext(spec.lexicon.ordered_terms, echo_k)
        del engine
    report = BenchReport(tuple(cells), tuple(loads), host_metadata())
    report.require_complete(config.engines)
    return report, echo


# ---------------------------------------------------------------------------
# Report rendering


def emit_report(
    report: BenchReport, out_dir: str | Path, q1_echo: ResultSet | None = None
) -> dict[str, Path]:
    """Write bench.csv, bench.md and one TSV per metric. Returns the paths."""
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        probe = out_dir / ".write-probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise OSError(f"output directory {out_dir} is not writable: {exc}") from exc

    paths: dict[str, Path] = {}
    csv_path = out_dir / "bench.csv"
    with csv_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["engine", "query", "metric", "value"])
        for engine, ms in report.load_ms:
            writer.writerow([engine, "load", "load_ms", repr(ms)])
        for cell in report.cells:
            for metric in METRICS:
                writer.writerow([cell.engine, cell.query_id, metric, repr(getattr(cell, metric))])
    paths["csv"] = csv_path

    md_path = out_dir / "bench.md"
    md_path.write_text(render_markdown(report, q1_echo), encoding="utf-8")
    paths["markdown"] = md_path

    engines = list(dict.fromkeys(c.engine for c in report.cells))
    queries = list(dict.fromkeys(c.query_id for c in report.cells))
    for metric in METRICS:
        tsv_path = out_dir / f"{metric}.tsv"
        lines = ["query\t" + "\t".join(engines)]
        for query_id in queries:
            vals = [repr(getattr(report.cell(e, query_id), metric)) for e in engines]
            lines.append(query_id + "\t" + "\t".join(vals))
        tsv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        paths[metric] = tsv_path
    return paths


def render_markdown(report: BenchReport, q1_echo: ResultSet | None = None) -> str:
    lines = ["# Benchmark report", ""]
    if report.host:
        lines += ["## Host", ""]
        lines += [f"- {key}: {value}" for key, value in report.host]
        lines.append("")
    if report.load_ms:
        lines += ["## Load phase", "", "| Engine | Load ms |", "| --- | ---: |"]
        lines += [f"| {engine} | {ms:.2f} |" for engine, ms in report.load_ms]
        lines.append("")
    lines += [
        "## Query latency and resources",
        "",
        "| Engine | Query | Median ms | p95 ms | CPU max % | CPU avg % | Peak mem MB |",
        "| --- | --- | ---: | ---: | ---: | ---: | ---: |",
    ]
    for cell in report.cells:
        lines.append(
            f"| {cell.engine} | {cell.query_id} | {cell.median_wall_ms:.3f} "
            f"| {cell.p95_wall_ms:.3f} | {cell.cpu_max_pct:.1f} "
            f"| {cell.cpu_avg_pct:.1f} | {cell.peak_mem_mb:.1f} |"
        )
    lines.append("")
    if q1_echo is not None and q1_echo.rows:
        lines += [
            "## Sample full-text hits",
            "",
            "| Stock | Date | Media | Score |",
            "| --- | --- | --- | ---: |",
        ]
        for hit in q1_echo.rows:
            lines.append(f"| {hit.symbol} | {hit.date.isoformat(sep=' ')} | {hit.media} | {hit.score:.6f} |")
        lines.append("")
    return "\n".join(lines)


def read_report_csv(path: str | Path) -> BenchReport:
    """Rebuild a BenchReport from bench.csv; float values round-trip exactly."""
    loads: list[tuple[str, float]] = []
    values: dict[tuple[str, str], dict[str, float]] = {}
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["engine", "query", "metric", "value"]:
            raise ValueError(f"{path}: unexpected CSV header {header}")
        for engine, query, metric, value in reader:
            if query == "load":
                loads.append((engine, float(value)))
            else:
                values.setdefault((engine, query), {})[metric] = float(value)
    cells = tuple(
        ReportCell(engine=e, query_id=q, **metrics) for (e, q), metrics in values.items()
    )
    return BenchReport(cells, tuple(loads))
