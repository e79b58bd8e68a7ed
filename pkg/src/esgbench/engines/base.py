"""Common query surface shared by the three storage engines.

Every engine answers the same five query shapes over a validated dataset:

    Q1  full-text: articles matching any lexicon term, expanded to
        (article, mentioned stock) hits
    Q2  bars of each hit's stock on the article day
    Q3  bars of the stocks NOT hit on each article day (the complement is
        taken per reference day, which is what makes Q2 and Q3 partition the
        universe day by day)
    Q4  Q2 and Q3 semantics re-run for article day +1 .. +horizon
    Q5  bars of the hit stock's same-sector peers on the article day

The base class owns composition, canonical ordering and the per-query
instrumentation counters; subclasses implement the row producers in
whatever way their storage paradigm dictates.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from datetime import date, timedelta
from typing import Iterable, Sequence

from ..model import Dataset, ResultSet, SearchHit, canonical_order


class StorageEngine(ABC):
    """Load-once, then immutable; queries are safe to run concurrently."""

    name: str = "abstract"
    scorer: str = "none"

    def __init__(self) -> None:
        self.counters: dict[str, int] = {}
        self.loaded = False

    # -- lifecycle ----------------------------------------------------------

    def load(self, dataset: Dataset) -> None:
        if self.loaded:
            raise RuntimeError(f"{self.name} engine is already loaded")
        self._build(dataset)
        self.loaded = True

    @abstractmethod
    def _build(self, dataset: Dataset) -> None: ...

    def _begin_query(self) -> None:
        if not self.loaded:
            raise RuntimeError(f"{self.name} engine is not loaded")
        self.counters.clear()

    def _count(self, key: str, n: int = 1) -> None:
        self.counters[key] = self.counters.get(key, 0) + n

    # -- public query surface ------------------------------------------------

    def fulltext(self, terms: Sequence[str], k: int | None) -> ResultSet:
        if k is not None and k < 1:
            raise ValueError("k must be at least 1")
        self._begin_query()
        return ResultSet("Q1", canonical_order(self._fulltext_hits(tuple(terms), k)))

    def join_bars(self, hits: Sequence[SearchHit], day_offsets: Iterable[int] = (0,)) -> ResultSet:
        self._begin_query()
        return ResultSet("Q2", canonical_order(self._join_rows(hits, tuple(day_offsets))))

    def complement_bars(
        self, hits: Sequence[SearchHit], day_offsets: Iterable[int] = (0,)
    ) -> ResultSet:
        self._begin_query()
        return ResultSet("Q3", canonical_order(self._complement_rows(hits, tuple(day_offsets))))

    def horizon_join(self, hits: Sequence[SearchHit], horizon_days: int = 5) -> ResultSet:
        """Q2 plus Q3 semantics for each of the article days +1 .. +horizon."""
        self._begin_query()
        offsets = tuple(range(1, horizon_days + 1))
        rows = list(self._join_rows(hits, offsets))
        rows.extend(self._complement_rows(hits, offsets))
        return ResultSet("Q4", canonical_order(rows))

    def sector_peers(self, hits: Sequence[SearchHit]) -> ResultSet:
        self._begin_query()
        return ResultSet("Q5", canonical_order(self._peer_rows(hits)))

    def run_query(self, query_id: str, spec) -> ResultSet:
        """One-shot entry point; Q2..Q5 recompute the hit set themselves."""
        terms = spec.lexicon.ordered_terms
        if query_id == "Q1":
            return self.fulltext(terms, spec.k)
        hits = self.fulltext(terms, spec.k).rows
        if query_id == "Q2":
            return self.join_bars(hits)
        if query_id == "Q3":
            return self.complement_bars(hits)
        if query_id == "Q4":
            return self.horizon_join(hits, spec.horizon_days)
        if query_id == "Q5":
            return self.sector_peers(hits)
        raise ValueError(f"unknown query id {query_id!r}")

    # -- paradigm-specific row producers --------------------------------------

    @abstractmethod
    def _fulltext_hits(self, terms: tuple[str, ...], k: int | None) -> list[SearchHit]: ...

    @abstractmethod
    def _join_rows(self, hits: Sequence[SearchHit], offsets: tuple[int, ...]) -> list: ...

    @abstractmethod
    def _complement_rows(self, hits: Sequence[SearchHit], offsets: tuple[int, ...]) -> list: ...

    @abstractmethod
    def _peer_rows(self, hits: Sequence[SearchHit]) -> list: ...

    # -- shared helpers --------------------------------------------------------

    @staticmethod
    def _hit_day_map(hits: Sequence[SearchHit]) -> dict[date, set[str]]:
        """Reference day -> symbols hit on that day, in first-seen day order."""
        days: dict[date, set[str]] = {}
        for hit in hits:
            days.setdefault(hit.date.date(), set()).add(hit.symbol)
        return days

    @staticmethod
    def _shift(day: date, offset: int) -> date:
        return day + timedelta(days=offset)
