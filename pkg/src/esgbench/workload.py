"""The five-query benchmark workload and the cross-engine equivalence checker.

Q1 matches articles containing ANY lexicon term and expands them to
(article, stock) hits; Q2..Q5 consume Q1's hit set as described in
engines.base. ``k`` counts matched documents before mention expansion and
may be None for "all matches".

Equivalence semantics: the relational engine ranks with a different score
family than the other two, so its Q1 is compared as an unordered set of
(stock, date, media) triples, while the two BM25 engines must agree on the
exact order. Q2..Q5 are compared as exact ordered row lists; canonical
ordering makes that well defined.

Verification runs with unlimited k. Truncated top-k sets under different
scorers legitimately differ, so comparing them would say nothing about
engine correctness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .engines import ENGINE_NAMES, StorageEngine, make_engine
from .model import Dataset, EsgLexicon, ResultSet, SearchHit

QUERY_IDS = ("Q1", "Q2", "Q3", "Q4", "Q5")


@dataclass(frozen=True)
class QuerySpec:
    """Workload parameters: the lexicon, Q1's top-k, and Q4's horizon."""

    lexicon: EsgLexicon = field(default_factory=EsgLexicon.default)
    k: int | None = 10
    horizon_days: int = 5

    def save(self, path: str | Path) -> None:
        """Write the plain key-value form: lexicon, k, horizon_days."""
        lines = [
            f"lexicon = {','.join(self.lexicon.ordered_terms)}",
            f"k = {'all' if self.k is None else self.k}",
            f"horizon_days = {self.horizon_days}",
        ]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "QuerySpec":
        values: dict[str, str] = {}
        for raw in Path(path).read_text(encoding="utf-8").splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {raw!r}")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
        unknown = set(values) - {"lexicon", "k", "horizon_days"}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        lexicon = (
            EsgLexicon(frozenset(t.strip() for t in values["lexicon"].split(",") if t.strip()))
            if "lexicon" in values
            else EsgLexicon.default()
        )
        k_raw = values.get("k", "10")
        k = None if k_raw == "all" else int(k_raw)
        return cls(lexicon=lexicon, k=k, horizon_days=int(values.get("horizon_days", "5")))


def run_workload(engine: StorageEngine, spec: QuerySpec) -> dict[str, ResultSet]:
    """Execute Q1 and thread its hits into Q2..Q5."""
    if not engine.loaded:
        raise RuntimeError(f"{engine.name} engine is not loaded")
    terms = spec.lexicon.ordered_terms
    q1 = engine.fulltext(terms, spec.k)
    hits = q1.rows
    return {
        "Q1": q1,
        "Q2": engine.join_bars(hits),
        "Q3": engine.complement_bars(hits),
        "Q4": engine.horizon_join(hits, spec.horizon_days),
        "Q5": engine.sector_peers(hits),
    }


@dataclass(frozen=True)
class Divergence:
    query_id: str
    row_index: int | None
    left: str
    right: str

    def __str__(self) -> str:
        where = f" row {self.row_index}" if self.row_index is not None else ""
        return f"{self.query_id}{where}: {self.left} != {self.right}"


@dataclass(frozen=True)
class EquivalenceReport:
    divergences: tuple[Divergence, ...] = ()

    @property
    def equivalent(self) -> bool:
        return not self.divergences


def _hit_triple(hit: SearchHit) -> tuple:
    return (hit.symbol, hit.date, hit.media)


def _first_divergence(query_id: str, rows_a: Sequence, rows_b: Sequence) -> Divergence | None:
    for i, (a, b) in enumerate(zip(rows_a, rows_b)):
        if a != b:
            return Divergence(query_id, i, repr(a), repr(b))
    if len(rows_a) != len(rows_b):
        i = min(len(rows_a), len(rows_b))
        longer = rows_a if len(rows_a) > len(rows_b) else rows_b
        side = "left" if len(rows_a) > len(rows_b) else "right"
        return Divergence(query_id, i, f"{len(rows_a)} rows", f"{len(rows_b)} rows ({side} has extra {longer[i]!r})")
    return None


def assert_equivalent(
    results_a: Mapping[str, ResultSet],
    results_b: Mapping[str, ResultSet],
    ordered_q1: bool = False,
) -> EquivalenceReport:
    """Compare two workload outputs; the report names the first divergence per query.

    ``ordered_q1`` should be True only when both sides rank with the same
    scorer.
    """
    divergences: list[Divergence] = []
    for query_id in QUERY_IDS:
        rows_a = results_a[query_id].rows
        rows_b = results_b[query_id].rows
        if query_id == "Q1":
            triples_a = [_hit_triple(h) for h in rows_a]
            triples_b = [_hit_triple(h) for h in rows_b]
            if not ordered_q1:
                triples_a.sort()
                triples_b.sort()
            d = _first_divergence(query_id, triples_a, triples_b)
        else:
            d = _first_divergence(query_id, rows_a, rows_b)
        if d is not None:
            divergences.append(d)
    return EquivalenceReport(tuple(divergences))


@dataclass(frozen=True)
class VerifyReport:
    pair_reports: tuple[tuple[str, str, EquivalenceReport], ...]
    results: dict[str, dict[str, ResultSet]]

    @property
    def ok(self) -> bool:
        return all(rep.equivalent for _, _, rep in self.pair_reports)

    def summary(self) -> str:
        lines = []
        for left, right, rep in self.pair_reports:
            status = "equivalent" if rep.equivalent else "DIVERGED"
            lines.append(f"{left} vs {right}: {status}")
            lines.extend(f"  {d}" for d in rep.divergences)
        return "\n".join(lines)


def verify_engines(
    dataset: Dataset,
    lexicon: EsgLexicon | None = None,
    engine_names: Sequence[str] = ENGINE_NAMES,
    shard_count: int = 1,
    engines: Mapping[str, StorageEngine] | None = None,
) -> VerifyReport:
    """Run the workload with unlimited k on every engine and compare all pairs."""
    spec = QuerySpec(lexicon=lexicon or EsgLexicon.default(), k=None)
    loaded: dict[str, StorageEngine] = {}
    for name in engine_names:
        if engines and name in engines:
            loaded[name] = engines[name]
        else:
            engine = make_engine(name, shard_count=shard_count)
            engine.load(dataset)
            loaded[name] = engine
    results = {name: run_workload(engine, spec) for name, engine in loaded.items()}
    pairs = []
    names = list(results)
    for i, left in enumerate(names):
        for right in names[i + 1 :]:
            ordered = loaded[left].scorer == loaded[right].scorer
            pairs.append((left, right, assert_equivalent(results[left], results[right], ordered)))
    return VerifyReport(tuple(pairs), results)
