"""Independent oracles and hand-built fixtures shared by the test modules.

Everything here recomputes results from first principles: its own
tokenization, its own BM25 arithmetic, plain nested loops for the joins.
None of it reuses the engine or index code paths it is checking.
"""

from __future__ import annotations

import math
import re
import time
from datetime import date, datetime, timedelta
from decimal import Decimal

from esgbench.engines.base import StorageEngine
from esgbench.model import Dataset, NewsDoc, OhlcBar, Sector, Stock

_WORD = re.compile(r"[A-Za-z0-9]+")


def oracle_tokens(text: str) -> list[str]:
    return [w.lower() for w in _WORD.findall(text)]


class BruteForceBM25:
    """Recomputes BM25 from raw token lists, scoring every document."""

    def __init__(self, docs: list[tuple[str, str]], k1: float = 1.2, b: float = 0.75):
        self.docs = {doc_id: oracle_tokens(text) for doc_id, text in docs}
        self.n = len(self.docs)
        lengths = [len(toks) for toks in self.docs.values()]
        self.avg = sum(lengths) / self.n if self.n else 0.0
        self.k1 = k1
        self.b = b

    def df(self, term: str) -> int:
        return sum(1 for toks in self.docs.values() if term in toks)

    def score(self, doc_id: str, terms) -> float:
        toks = self.docs[doc_id]
        dl = len(toks)
        total = 0.0
        for term in terms:
            tf = toks.count(term)
            if tf == 0:
                continue
            df = self.df(term)
            idf = math.log(1.0 + (self.n - df + 0.5) / (df + 0.5))
            total += idf * (tf * (self.k1 + 1.0)) / (
                tf + self.k1 * (1.0 - self.b + self.b * dl / self.avg)
            )
        return total

    def top_k(self, terms, k: int | None) -> list[tuple[str, float]]:
        scored = [
            (doc_id, self.score(doc_id, terms))
            for doc_id, toks in self.docs.items()
            if any(t in toks for t in terms)
        ]
        scored.sort(key=lambda e: (-e[1], e[0]))
        return scored if k is None else scored[:k]


def oracle_tsrank(text: str, terms) -> float:
    toks = oracle_tokens(text)
    total = sum(toks.count(t) / (toks.count(t) + 1.0) for t in terms if t in toks)
    if total == 0.0 or not toks:
        return 0.0
    return total / (1.0 + math.log(len(toks)))


# ---------------------------------------------------------------------------
# Nested-loop join oracles


def oracle_join(hits, bars, offsets=(0,)) -> list:
    rows = []
    for hit in hits:
        for off in offsets:
            target = hit.date.date() + timedelta(days=off)
            for bar in bars:
                if bar.symbol == hit.symbol and bar.timestamp.date() == target:
                    rows.append((bar.symbol, bar))
    return rows


def oracle_complement(hits, bars, stocks, offsets=(0,)) -> list:
    day_syms: dict[date, set[str]] = {}
    for hit in hits:
        day_syms.setdefault(hit.date.date(), set()).add(hit.symbol)
    rows = []
    for day, hit_symbols in day_syms.items():
        for off in offsets:
            target = day + timedelta(days=off)
            for stock in stocks:
                if stock.symbol in hit_symbols:
                    continue
                for bar in bars:
                    if bar.symbol == stock.symbol and bar.timestamp.date() == target:
                        rows.append((bar.symbol, bar))
    return rows


def oracle_peers(hits, bars, stocks) -> list:
    sector_of = {s.symbol: s.sector_id for s in stocks}
    rows = []
    for hit in hits:
        day = hit.date.date()
        for stock in stocks:
            if stock.symbol == hit.symbol or sector_of.get(hit.symbol) != stock.sector_id:
                continue
            for bar in bars:
                if bar.symbol == stock.symbol and bar.timestamp.date() == day:
                    rows.append((bar.symbol, bar))
    return rows


def as_sorted_rows(rows) -> list:
    return sorted(rows, key=lambda r: (r[0], r[1].timestamp))


# ---------------------------------------------------------------------------
# Hand-built fixture pieces


def bar(symbol: str, ts: str, lo="99.0000", hi="102.0000", op="100.0000", cl="101.0000", vol=1000) -> OhlcBar:
    return OhlcBar(symbol, datetime.fromisoformat(ts), Decimal(op), Decimal(hi), Decimal(lo), Decimal(cl), vol)


def news(doc_id: str, ts: str, content: str, mentions=(), media="Wire") -> NewsDoc:
    return NewsDoc(doc_id, media, datetime.fromisoformat(ts), content, frozenset(mentions))


def tiny_universe() -> tuple[list[Stock], list[Sector]]:
    sectors = [Sector("metals", "Metals and Mining"), Sector("it", "Information Technology")]
    stocks = [
        Stock("TATASTEEL", "Tata Steel", "metals"),
        Stock("JSWSTEEL", "JSW Steel", "metals"),
        Stock("INFY", "Infosys", "it"),
    ]
    return stocks, sectors


# ---------------------------------------------------------------------------
# Harness stubs


class SleepEngine(StorageEngine):
    """Every query takes a fixed wall time while mostly idle."""

    name = "stub"
    scorer = "none"

    def __init__(self, seconds: float = 0.1):
        super().__init__()
        self.seconds = seconds

    def _build(self, dataset) -> None:
        pass

    def _wait(self) -> list:
        time.sleep(self.seconds)
        return []

    def _fulltext_hits(self, terms, k):
        return self._wait()

    def _join_rows(self, hits, offsets):
        return self._wait()

    def _complement_rows(self, hits, offsets):
        return self._wait()

    def _peer_rows(self, hits):
        return self._wait()


class BusyEngine(SleepEngine):
    """Every query spins the CPU for a fixed wall time."""

    name = "busy-stub"

    def _wait(self) -> list:
        deadline = time.perf_counter() + self.seconds
        x = 0
        while time.perf_counter() < deadline:
            x += 1
        return []


class SlowLoadEngine(SleepEngine):
    """Slow to load, instant to query; separates load cost from query cost."""

    name = "slow-load-stub"

    def __init__(self, load_seconds: float = 0.2):
        super().__init__(seconds=0.0)
        self.load_seconds = load_seconds

    def _build(self, dataset) -> None:
        time.sleep(self.load_seconds)

    def _wait(self) -> list:
        return []


EMPTY_DATASET = Dataset(
    stocks=(Stock("AAA", "Alpha Alpha", "s1"),),
    sectors=(Sector("s1", "Sector One"),),
    news=(),
    bars=(),
)
