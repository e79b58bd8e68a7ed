"""Row-store engine: heap tables, sequential scans, per-query hash joins.

This is the relational baseline. News rows carry a tsvector-style token
frequency column built at load time, but there is no inverted structure on
top of it, so full-text search is always a sequential scan that scores every
row. Join queries build a transient hash table over the small side (the hit
set) and probe it with one scan of the bars heap, which is how a row store
without secondary indexes executes them.
"""

from __future__ import annotations

from typing import Sequence

from ..model import Dataset, SearchHit
from ..textindex import build_token_vector, tsrank_score
from .base import StorageEngine


class Table:
    """Append-ordered heap table with an optional unique hash index.

    ``key`` names one or more columns; inserts enforce uniqueness, and keyed
    lookups agree with a full scan by construction.
    """

    def __init__(self, name: str, key: str | tuple[str, ...] | None = None) -> None:
        self.name = name
        self.key = (key,) if isinstance(key, str) else key
        self.rows: list[dict] = []
        self._index: dict | None = {} if self.key else None

    def _key_of(self, row: dict):
        assert self.key is not None
        if len(self.key) == 1:
            return row[self.key[0]]
        return tuple(row[c] for c in self.key)

    def insert(self, row: dict) -> None:
        if self._index is not None:
            k = self._key_of(row)
            if k in self._index:
                raise ValueError(f"duplicate primary key {k!r} in table {self.name}")
            self._index[k] = len(self.rows)
        self.rows.append(row)

    def get(self, key) -> dict | None:
        if self._index is None:
            raise ValueError(f"table {self.name} has no key index")
        pos = self._index.get(key)
        return self.rows[pos] if pos is not None else None

    def __len__(self) -> int:
        return len(self.rows)


class RelationalEngine(StorageEngine):
    name = "relational"
    scorer = "tsrank"

    def _build(self, dataset: Dataset) -> None:
        self.stocks = Table("stocks", key="symbol")
        self.sectors = Table("sectors", key="sector_id")
        self.news = Table("news", key="doc_id")
        self.bars = Table("bars", key=("symbol", "timestamp"))

        for sector in dataset.sectors:
            self.sectors.insert({"sector_id": sector.sector_id, "name": sector.name})
        for stock in dataset.stocks:
            self.stocks.insert(
                {"symbol": stock.symbol, "name": stock.name, "sector_id": stock.sector_id}
            )
        for doc in dataset.news:
            tsv = build_token_vector(doc.content)
            self.news.insert(
                {
                    "doc_id": doc.doc_id,
                    "media": doc.media,
                    "timestamp": doc.timestamp,
                    "content": doc.content,
                    "mentions": tuple(sorted(doc.mentions)),
                    "tsv": tsv,
                    "doc_len": sum(tsv.values()),
                }
            )
        for bar in dataset.bars:
            self.bars.insert(
                {
                    "symbol": bar.symbol,
                    "timestamp": bar.timestamp,
                    "day": bar.timestamp.date(),
                    "open": bar.open,
                    "high": bar.high,
                    "low": bar.low,
                    "close": bar.close,
                    "volume": bar.volume,
                    "_rec": bar,
                }
            )

    # -- Q1 -------------------------------------------------------------------

    def _fulltext_hits(self, terms: tuple[str, ...], k: int | None) -> list[SearchHit]:
        matches: list[tuple[float, dict]] = []
        for row in self.news.rows:  # sequential scan; no text index in this paradigm
            score = tsrank_score(row["tsv"], terms, row["doc_len"])
            if score > 0.0:
                matches.append((score, row))
        matches.sort(key=lambda m: (-m[0], m[1]["doc_id"]))
        if k is not None:
            matches = matches[:k]
        hits = []
        for score, row in matches:
            for symbol in row["mentions"]:
                hits.append(SearchHit(symbol, row["timestamp"], row["media"], score))
        return hits

    # -- joins ------------------------------------------------------------------

    def _join_rows(self, hits: Sequence[SearchHit], offsets: tuple[int, ...]) -> list:
        build: dict[tuple, int] = {}
        for hit in hits:
            day = hit.date.date()
            for off in offsets:
                key = (hit.symbol, self._shift(day, off))
                build[key] = build.get(key, 0) + 1
        if not build:
            return []
        rows: list = []
        for row in self.bars.rows:  # probe side: one scan of the bars heap
            n = build.get((row["symbol"], row["day"]))
            if n:
                rows.extend(((row["symbol"], row["_rec"]),) * n)
        return rows

    def _complement_rows(self, hits: Sequence[SearchHit], offsets: tuple[int, ...]) -> list:
        day_map = self._hit_day_map(hits)
        if not day_map:
            return []
        # bar day -> excluded symbol sets, one per (article day, offset) pair
        targets: dict = {}
        for day, hit_syms in day_map.items():
            for off in offsets:
                targets.setdefault(self._shift(day, off), []).append(hit_syms)
        rows: list = []
        for row in self.bars.rows:
            exclusions = targets.get(row["day"])
            if exclusions:
                symbol = row["symbol"]
                for excluded in exclusions:
                    if symbol not in excluded:
                        rows.append((symbol, row["_rec"]))
        return rows

    def _peer_rows(self, hits: Sequence[SearchHit]) -> list:
        if not hits:
            return []
        members: dict[str, list[str]] = {}
        for srow in self.stocks.rows:  # per-query rebuild, scan of the stocks heap
            members.setdefault(srow["sector_id"], []).append(srow["symbol"])
        build: dict[tuple, int] = {}
        for hit in hits:
            srow = self.stocks.get(hit.symbol)
            if srow is None:
                continue
            day = hit.date.date()
            for peer in members[srow["sector_id"]]:
                if peer != hit.symbol:
                    key = (peer, day)
                    build[key] = build.get(key, 0) + 1
        rows: list = []
        for row in self.bars.rows:
            n = build.get((row["symbol"], row["day"]))
            if n:
                rows.extend(((row["symbol"], row["_rec"]),) * n)
        return rows
