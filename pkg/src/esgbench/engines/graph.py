"""Property-graph engine: typed nodes and relationships, index-free adjacency.

Stocks, sectors, news and bars are nodes; MENTIONS, IN_SECTOR and HAS_BAR
relationships connect them, with adjacency lists kept on both endpoints so
any hop costs O(degree) regardless of graph size. Each stock additionally
keeps a day-keyed map over its HAS_BAR neighbors, because "all bars of this
stock on day D" is the dominant access pattern of the join queries; the map
lets a traversal skip straight to the day instead of filtering every bar.

Full-text search over news nodes reuses the shared inverted index and BM25
scorer, then hops MENTIONS edges to produce (article, stock) hits.

Every query method counts the nodes it touches in ``counters["nodes_visited"]``;
traversal cost bounds are part of the engine's contract.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date
from typing import Sequence

from ..model import Dataset, SearchHit
from ..textindex import build_index, search
from .base import StorageEngine

REL_ENDPOINTS = {
    "MENTIONS": ("News", "Stock"),
    "IN_SECTOR": ("Stock", "Sector"),
    "HAS_BAR": ("Stock", "Bar"),
}


@dataclass(slots=True)
class Node:
    node_id: int
    label: str
    props: dict


@dataclass(frozen=True, slots=True)
class Relationship:
    rel_id: int
    rel_type: str
    source: int
    target: int


@dataclass(slots=True)
class _Adjacency:
    out: dict = field(default_factory=dict)  # rel_type -> list[rel_id]
    inc: dict = field(default_factory=dict)


class GraphEngine(StorageEngine):
    name = "graph"
    scorer = "bm25"

    # -- storage primitives -----------------------------------------------------

    def _init_storage(self) -> None:
        self._nodes: dict[int, Node] = {}
        self._rels: dict[int, Relationship] = {}
        self._adj: dict[int, _Adjacency] = {}
        self._by_label: dict[str, list[int]] = {}

    def add_node(self, label: str, props: dict) -> int:
        node_id = len(self._nodes)
        self._nodes[node_id] = Node(node_id, label, props)
        self._adj[node_id] = _Adjacency()
        self._by_label.setdefault(label, []).append(node_id)
        return node_id

    def add_relationship(self, rel_type: str, source: int, target: int) -> int:
        if source not in self._nodes or target not in self._nodes:
            raise ValueError(f"dangling endpoint on {rel_type}: {source} -> {target}")
        want = REL_ENDPOINTS.get(rel_type)
        if want is None:
            raise ValueError(f"unknown relationship type {rel_type!r}")
        got = (self._nodes[source].label, self._nodes[target].label)
        if got != want:
            raise ValueError(f"{rel_type} requires {want[0]} -> {want[1]}, got {got[0]} -> {got[1]}")
        rel_id = len(self._rels)
        self._rels[rel_id] = Relationship(rel_id, rel_type, source, target)
        self._adj[source].out.setdefault(rel_type, []).append(rel_id)
        self._adj[target].inc.setdefault(rel_type, []).append(rel_id)
        return rel_id

    def neighbors(self, node_id: int, rel_type: str, direction: str = "out") -> list[Node]:
        """Adjacent nodes over one relationship type, in insertion order."""
        if node_id not in self._nodes:
            raise KeyError(f"unknown node {node_id}")
        adj = self._adj[node_id]
        if direction == "out":
            rel_ids = adj.out.get(rel_type, ())
            return [self._nodes[self._rels[r].target] for r in rel_ids]
        if direction == "in":
            rel_ids = adj.inc.get(rel_type, ())
            return [self._nodes[self._rels[r].source] for r in rel_ids]
        raise ValueError(f"direction must be 'out' or 'in', not {direction!r}")

    def node_ids(self, label: str | None = None) -> list[int]:
        if label is None:
            return list(self._nodes)
        return list(self._by_label.get(label, ()))

    def node(self, node_id: int) -> Node:
        return self._nodes[node_id]

    def rel_count(self, rel_type: str | None = None) -> int:
        if rel_type is None:
            return len(self._rels)
        return sum(1 for r in self._rels.values() if r.rel_type == rel_type)

    @property
    def node_count(self) -> int:
        return len(self._nodes)

    # -- load ---------------------------------------------------------------------

    def _build(self, dataset: Dataset) -> None:
        self._init_storage()
        sector_nodes: dict[str, int] = {}
        for sector in dataset.sectors:
            sector_nodes[sector.sector_id] = self.add_node(
                "Sector", {"sector_id": sector.sector_id, "name": sector.name}
            )
        self._stock_nodes: dict[str, int] = {}
        self._bar_days: dict[int, dict[date, list[int]]] = {}  # stock node -> day map
        for stock in dataset.stocks:
            nid = self.add_node("Stock", {"symbol": stock.symbol, "name": stock.name})
            self._stock_nodes[stock.symbol] = nid
            self._bar_days[nid] = {}
            self.add_relationship("IN_SECTOR", nid, sector_nodes[stock.sector_id])
        self._news_nodes: dict[str, int] = {}
        for doc in dataset.news:
            nid = self.add_node(
                "News",
                {
                    "doc_id": doc.doc_id,
                    "media": doc.media,
                    "timestamp": doc.timestamp,
                    "content": doc.content,
                },
            )
            self._news_nodes[doc.doc_id] = nid
            for symbol in sorted(doc.mentions):
                self.add_relationship("MENTIONS", nid, self._stock_nodes[symbol])
        for bar in dataset.bars:
            stock_id = self._stock_nodes.get(bar.symbol)
            if stock_id is None:
                raise ValueError(f"bar references unknown stock {bar.symbol}")
            bar_id = self.add_node("Bar", {"bar": bar})
            self.add_relationship("HAS_BAR", stock_id, bar_id)
            self._bar_days[stock_id].setdefault(bar.day, []).append(bar_id)
        # full-text index over News.content
        self._index = build_index((doc.doc_id, doc.content) for doc in dataset.news)
        self._symbols = tuple(s.symbol for s in dataset.stocks)

    # -- traversal helpers -----------------------------------------------------------

    def _visit(self, n: int = 1) -> None:
        self._count("nodes_visited", n)

    def _day_bars(self, stock_id: int, day: date) -> list:
        """Skip-to-day read of one stock's HAS_BAR adjacency."""
        bar_ids = self._bar_days[stock_id].get(day, ())
        self._visit(len(bar_ids))
        nodes = self._nodes
        return [nodes[b].props["bar"] for b in bar_ids]

    # -- queries -------------------------------------------------------------------

    def _fulltext_hits(self, terms: tuple[str, ...], k: int | None) -> list[SearchHit]:
        hits = []
        for doc_id, score in search(self._index, terms, k):
            news_id = self._news_nodes[doc_id]
            news = self._nodes[news_id]
            self._visit()
            for stock in self.neighbors(news_id, "MENTIONS", "out"):  # one hop per hit
                self._visit()
                hits.append(
                    SearchHit(
                        stock.props["symbol"], news.props["timestamp"], news.props["media"], score
                    )
                )
        return hits

    def _join_rows(self, hits: Sequence[SearchHit], offsets: tuple[int, ...]) -> list:
        rows: list = []
        for hit in hits:
            stock_id = self._stock_nodes.get(hit.symbol)
            if stock_id is None:
                continue
            self._visit()
            day = hit.date.date()
            for off in offsets:
                for bar in self._day_bars(stock_id, self._shift(day, off)):
                    rows.append((hit.symbol, bar))
        return rows

    def _complement_rows(self, hits: Sequence[SearchHit], offsets: tuple[int, ...]) -> list:
        day_map = self._hit_day_map(hits)
        rows: list = []
        for day, hit_syms in day_map.items():
            for symbol in self._symbols:
                if symbol in hit_syms:
                    continue
                stock_id = self._stock_nodes[symbol]
                self._visit()
                for off in offsets:
                    for bar in self._day_bars(stock_id, self._shift(day, off)):
                        rows.append((symbol, bar))
        return rows

    def _peer_rows(self, hits: Sequence[SearchHit]) -> list:
        rows: list = []
        for hit in hits:
            stock_id = self._stock_nodes.get(hit.symbol)
            if stock_id is None:
                continue
            self._visit()
            day = hit.date.date()
            for sector in self.neighbors(stock_id, "IN_SECTOR", "out"):
                self._visit()
                for peer in self.neighbors(sector.node_id, "IN_SECTOR", "in"):
                    symbol = peer.props["symbol"]
                    if symbol == hit.symbol:
                        continue
                    self._visit()
                    for bar in self._day_bars(peer.node_id, day):
                        rows.append((symbol, bar))
        return rows
