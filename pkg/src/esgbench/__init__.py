"""Embedded multi-paradigm storage benchmark for ESG equity filtering.

Three engines (row store, sharded document store, property graph) answer the
same five queries over one stock/news/OHLC dataset; the harness checks that
their answers agree and measures how differently they get there.
"""

from .bench import BenchConfig, BenchReport, emit_report, run_matrix, time_query
from .engines import ENGINE_NAMES, DocumentEngine, GraphEngine, RelationalEngine, make_engine
from .ingest import GeneratorConfig, generate, load_dataset, write_dataset
from .model import (
    BenchSample,
    Dataset,
    EsgLexicon,
    NewsDoc,
    OhlcBar,
    ResultSet,
    SearchHit,
    Sector,
    Stock,
    ValidationReport,
    canonical_order,
    validate_dataset,
)
from .workload import (
    QUERY_IDS,
    EquivalenceReport,
    QuerySpec,
    assert_equivalent,
    run_workload,
    verify_engines,
)

__version__ = "0.1.0"

__all__ = [
    "BenchConfig",
    "BenchReport",
    "BenchSample",
    "Dataset",
    "DocumentEngine",
    "ENGINE_NAMES",
    "EquivalenceReport",
    "EsgLexicon",
    "GeneratorConfig",
    "GraphEngine",
    "NewsDoc",
    "OhlcBar",
    "QUERY_IDS",
    "QuerySpec",
    "RelationalEngine",
    "ResultSet",
    "SearchHit",
    "Sector",
    "Stock",
    "ValidationReport",
    "assert_equivalent",
    "canonical_order",
    "emit_report",
    "generate",
    "load_dataset",
    "make_engine",
    "run_matrix",
    "run_workload",
    "time_query",
    "validate_dataset",
    "verify_engines",
    "write_dataset",
]
