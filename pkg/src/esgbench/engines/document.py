"""Document-store engine: sharded JSON-like collections behind a search API.

News and bars live in separate collections, hash-partitioned over shards.
Each shard keeps an inverted index over analyzed text (the news content);
structured fields are not secondary-indexed, so a term/range filter costs
one pass over the collection per query, which is exactly what makes the
client-side join pattern expensive: relating N hits to bars issues N
separate filter queries.

Search runs in two phases. The scatter phase asks every shard for its local
top-k, scored document-at-a-time by merging the term posting streams, with
document frequencies taken from the engine-wide table so sharding never
changes a score. The gather phase merge-sorts the shard lists, truncates to
k, then fetches the stored records of the winners to build hits.

Shard-local searches are independent and side-effect-free, so they could be
scattered to concurrently; this implementation runs them sequentially and
keeps the gather a deterministic single-threaded merge either way.
"""

from __future__ import annotations

import heapq
from collections import Counter
from datetime import date
from typing import Sequence
from zlib import crc32

from ..model import Dataset, OhlcBar, SearchHit
from ..textindex import InvertedIndex, bm25_term_weight, build_index
from .base import StorageEngine


def shard_of(doc_id: str, shard_count: int) -> int:
    """Stable routing: crc32, not the process-salted builtin hash."""
    return crc32(doc_id.encode("utf-8")) % shard_count


class Shard:
    """One partition: a local doc store per collection plus a local text index."""

    def __init__(self, shard_id: int) -> None:
        self.shard_id = shard_id
        self.news_records: dict[str, dict] = {}
        self._news_texts: list[tuple[str, str]] = []
        self.news_index: InvertedIndex | None = None
        # bars collection: record list plus per-field value columns for filtering
        self.bar_records: list[dict] = []
        self.bar_symbols: list[str] = []
        self.bar_days: list[int] = []

    def add_news(self, doc_id: str, record: dict, content: str) -> None:
        self.news_records[doc_id] = record
        self._news_texts.append((doc_id, content))

    def add_bar(self, record: dict, day_ordinal: int) -> None:
        self.bar_records.append(record)
        self.bar_symbols.append(record["symbol"])
        self.bar_days.append(day_ordinal)

    def finalize(self) -> None:
        self.news_index = build_index(self._news_texts)
        self._news_texts = []


class DocumentEngine(StorageEngine):
    name = "document"
    scorer = "bm25"

    def __init__(self, shard_count: int = 1) -> None:
        super().__init__()
        if shard_count < 1:
            raise ValueError("shard_count must be at least 1")
        self.shard_count = shard_count

    def _build(self, dataset: Dataset) -> None:
        self.shards = [Shard(i) for i in range(self.shard_count)]
        for doc in dataset.news:
            record = {
                "doc_id": doc.doc_id,
                "media": doc.media,
                "timestamp": doc.timestamp,
                "content": doc.content,
                "mentions": tuple(sorted(doc.mentions)),
            }
            self.shards[shard_of(doc.doc_id, self.shard_count)].add_news(
                doc.doc_id, record, doc.content
            )
        for i, bar in enumerate(dataset.bars):
            doc_id = f"bar-{i:08d}"
            record = {
                "doc_id": doc_id,
                "symbol": bar.symbol,
                "timestamp": bar.timestamp,
                "open": bar.open,
                "high": bar.high,
                "low": bar.low,
                "close": bar.close,
                "volume": bar.volume,
            }
            self.shards[shard_of(doc_id, self.shard_count)].add_bar(record, bar.day.toordinal())
        for shard in self.shards:
            shard.finalize()

        # engine-wide statistics so scatter scoring is shard-layout independent
        self._df: Counter = Counter()
        total_len = 0
        n_docs = 0
        for shard in self.shards:
            idx = shard.news_index
            for term, plist in idx.postings.items():
                self._df[term] += len(plist)
            total_len += sum(idx.doc_lengths.values())
            n_docs += idx.doc_count
        self._n_docs = n_docs
        self._avg_len = (total_len / n_docs) if n_docs else 0.0

        # application-side lookup tables (the client knows the universe)
        self.universe = tuple(s.symbol for s in dataset.stocks)
        self.sector_of = {s.symbol: s.sector_id for s in dataset.stocks}
        self.sector_members: dict[str, list[str]] = {}
        for stock in dataset.stocks:
            self.sector_members.setdefault(stock.sector_id, []).append(stock.symbol)

    # -- search ----------------------------------------------------------------

    def _shard_search(
        self, shard: Shard, terms: tuple[str, ...], k: int | None
    ) -> list[tuple[float, str]]:
        """Local top-k, document-at-a-time over the shard's posting streams."""
        self._count("shard_searches")
        idx = shard.news_index
        streams = []
        for t_ord, term in enumerate(terms):
            plist = idx.postings.get(term)
            if plist:
                df = self._df[term]
                streams.append([(doc_id, t_ord, tf, df) for doc_id, tf, _ in plist])
        if not streams:
            return []
        doc_lengths = idx.doc_lengths
        n, avg = self._n_docs, self._avg_len
        scored: list[tuple[float, str]] = []
        cur_doc: str | None = None
        cur_score = 0.0
        for doc_id, _t_ord, tf, df in heapq.merge(*streams):
            if doc_id != cur_doc:
                if cur_doc is not None:
                    scored.append((cur_score, cur_doc))
                cur_doc, cur_score = doc_id, 0.0
            cur_score += bm25_term_weight(tf, df, doc_lengths[doc_id], n, avg)
        if cur_doc is not None:
            scored.append((cur_score, cur_doc))
        scored.sort(key=lambda e: (-e[0], e[1]))
        return scored[:k] if k is not None else scored

    def _fulltext_hits(self, terms: tuple[str, ...], k: int | None) -> list[SearchHit]:
        shard_results = [self._shard_search(shard, terms, k) for shard in self.shards]  # scatter
        merged: list[tuple[float, str]] = []
        for result in shard_results:  # gather
            merged.extend(result)
        merged.sort(key=lambda e: (-e[0], e[1]))
        if k is not None:
            merged = merged[:k]
        hits = []
        for score, doc_id in merged:  # fetch phase: retrieve stored records
            record = self.shards[shard_of(doc_id, self.shard_count)].news_records[doc_id]
            for symbol in record["mentions"]:
                hits.append(SearchHit(symbol, record["timestamp"], record["media"], score))
        return hits

    # -- structured filter queries ------------------------------------------------

    def _filter_bars(self, symbol: str, day: date) -> list[dict]:
        """One bars-collection query: symbol term plus day filter, all shards."""
        self._count("subqueries")
        day_ord = day.toordinal()
        out: list[dict] = []
        for shard in self.shards:
            days = shard.bar_days
            records = shard.bar_records
            for i, sym in enumerate(shard.bar_symbols):
                if sym == symbol and days[i] == day_ord:
                    out.append(records[i])
        return out

    @staticmethod
    def _to_bar(record: dict) -> OhlcBar:
        return OhlcBar(
            record["symbol"],
            record["timestamp"],
            record["open"],
            record["high"],
            record["low"],
            record["close"],
            record["volume"],
        )

    # -- application-side joins ----------------------------------------------------

    def _join_rows(self, hits: Sequence[SearchHit], offsets: tuple[int, ...]) -> list:
        rows: list = []
        for hit in hits:  # one filter query per hit and offset
            day = hit.date.date()
            for off in offsets:
                for record in self._filter_bars(hit.symbol, self._shift(day, off)):
                    rows.append((record["symbol"], self._to_bar(record)))
        return rows

    def _complement_rows(self, hits: Sequence[SearchHit], offsets: tuple[int, ...]) -> list:
        day_map = self._hit_day_map(hits)
        rows: list = []
        for day, hit_syms in day_map.items():
            others = [s for s in self.universe if s not in hit_syms]  # universe scan
            for off in offsets:
                target = self._shift(day, off)
                for symbol in others:  # one bars query per unaffected stock
                    for record in self._filter_bars(symbol, target):
                        rows.append((record["symbol"], self._to_bar(record)))
        return rows

    def _peer_rows(self, hits: Sequence[SearchHit]) -> list:
        rows: list = []
        for hit in hits:
            sector = self.sector_of.get(hit.symbol)
            if sector is None:
                continue
            day = hit.date.date()
            for peer in self.sector_members[sector]:  # sector lookup table
                if peer == hit.symbol:
                    continue
                for record in self._filter_bars(peer, day):
                    rows.append((record["symbol"], self._to_bar(record)))
        return rows
