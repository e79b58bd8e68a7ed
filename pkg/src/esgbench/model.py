"""Engine-independent domain types, validation, and canonical result ordering.

Everything the three storage engines share lives here: the stock/news/OHLC
data model, the ESG term lexicon, search hits and result sets, and the
benchmark sample record. Types are plain frozen dataclasses; records are
immutable once validated and safe to share across engines and threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import date, datetime
from decimal import Decimal
from typing import Iterable, Sequence

PRICE_QUANTUM = Decimal("0.0001")

DEFAULT_ESG_TERMS = frozenset(
    {
        "esg",
        "environmental",
        "social",
        "governance",
        "sustainability",
        "emission",
        "carbon",
        "biodiesel",
        "renewable",
    }
)

_SYMBOL_RE = re.compile(r"^[A-Z0-9]+$")
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True, slots=True)
class Sector:
    sector_id: str
    name: str


@dataclass(frozen=True, slots=True)
class Stock:
    symbol: str
    name: str
    sector_id: str


@dataclass(frozen=True, slots=True)
class NewsDoc:
    """One news article: source, microsecond timestamp, text, linked tickers."""

    doc_id: str
    media: str
    timestamp: datetime
    content: str
    mentions: frozenset[str] = frozenset()


@dataclass(frozen=True, slots=True)
class OhlcBar:
    """One open/high/low/close observation for a stock at a timestamp.

    Prices are fixed-point decimals with 4 fractional digits so that equality
    is exact across engines; floats would break the cross-engine row checks.
    """

    symbol: str
    timestamp: datetime
    open: Decimal
    high: Decimal
    low: Decimal
    close: Decimal
    volume: int

    @property
    def day(self) -> date:
        return self.timestamp.date()


@dataclass(frozen=True, slots=True)
class EsgLexicon:
    """The set of terms that drives ESG news matching.

    Terms must already be in analyzed form (lowercase, single token) so that
    matching semantics are identical in all three engines.
    """

    terms: frozenset[str]

    def __post_init__(self) -> None:
        if not self.terms:
            raise ValueError("lexicon must contain at least one term")
        for term in self.terms:
            if _TOKEN_RE.findall(term.lower()) != [term]:
                raise ValueError(f"lexicon term {term!r} does not survive the analyzer")

    @classmethod
    def default(cls) -> "EsgLexicon":
        return cls(DEFAULT_ESG_TERMS)

    @property
    def ordered_terms(self) -> tuple[str, ...]:
        """Terms in the fixed order used for scoring everywhere.

        A stable order makes floating-point score accumulation bit-identical
        across engines.
        """
        return tuple(sorted(self.terms))


@dataclass(frozen=True, slots=True)
class SearchHit:
    """One (stock, article) match produced by a full-text query."""

    symbol: str
    date: datetime
    media: str
    score: float


@dataclass(frozen=True, slots=True)
class ResultSet:
    """Rows of one query in canonical order, comparable across engines.

    Q1 rows are SearchHit; Q2..Q5 rows are (symbol, OhlcBar) pairs.
    """

    query_id: str
    rows: tuple = ()


@dataclass(frozen=True, slots=True)
class BenchSample:
    """One measured query execution."""

    engine: str
    query_id: str
    wall_ms: float
    cpu_max_pct: float
    cpu_avg_pct: float
    peak_mem_mb: float

    def __post_init__(self) -> None:
        if self.wall_ms <= 0:
            raise ValueError("wall_ms must be positive")
        if self.cpu_avg_pct > self.cpu_max_pct:
            raise ValueError("cpu_avg_pct cannot exceed cpu_max_pct")


@dataclass(frozen=True, slots=True)
class Dataset:
    """A validated, immutable collection of stocks, sectors, news and bars."""

    stocks: tuple[Stock, ...]
    sectors: tuple[Sector, ...]
    news: tuple[NewsDoc, ...]
    bars: tuple[OhlcBar, ...]


@dataclass(frozen=True, slots=True)
class Rejection:
    kind: str
    ident: str
    reason: str


@dataclass(frozen=True, slots=True)
class ValidationReport:
    """Accepted data plus every rejected record with its reason."""

    dataset: Dataset
    rejections: tuple[Rejection, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.rejections

    def counts(self) -> dict[str, int]:
        d = self.dataset
        return {
            "stocks": len(d.stocks),
            "sectors": len(d.sectors),
            "news": len(d.news),
            "bars": len(d.bars),
        }

    def summary(self) -> str:
        c = self.counts()
        lines = [
            f"accepted: {c['stocks']} stocks, {c['sectors']} sectors, "
            f"{c['news']} news, {c['bars']} bars",
            f"rejected: {len(self.rejections)}",
        ]
        lines.extend(f"  {r.kind} {r.ident}: {r.reason}" for r in self.rejections)
        return "\n".join(lines)


def bar_violation(bar: OhlcBar) -> str | None:
    """Return the first OHLC invariant this bar breaks, or None if clean."""
    prices = (bar.open, bar.high, bar.low, bar.close)
    if any(p <= 0 for p in prices):
        return "non-positive price"
    if any(-p.as_tuple().exponent > 4 for p in prices):
        return "price precision exceeds 4 decimal places"
    if bar.low > bar.high:
        return "low exceeds high"
    if bar.low > min(bar.open, bar.close):
        return "low exceeds open or close"
    if max(bar.open, bar.close) > bar.high:
        return "open or close exceeds high"
    if bar.volume < 0:
        return "negative volume"
    return None


def validate_dataset(
    stocks: Iterable[Stock],
    sectors: Iterable[Sector],
    news: Iterable[NewsDoc],
    bars: Iterable[OhlcBar],
) -> ValidationReport:
    """Filter possibly-dirty collections down to records satisfying all invariants.

    Rejections are data, not failures: each one is reported with a reason.
    An empty stock universe is the one hard error, since no query is
    meaningful without it.
    """
    rejections: list[Rejection] = []

    ok_sectors: list[Sector] = []
    seen_sector_names: set[str] = set()
    seen_sector_ids: set[str] = set()
    for sec in sectors:
        if not sec.name:
            rejections.append(Rejection("sector", sec.sector_id, "empty name"))
        elif sec.name in seen_sector_names or sec.sector_id in seen_sector_ids:
            rejections.append(Rejection("sector", sec.sector_id, "duplicate sector"))
        else:
            seen_sector_names.add(sec.name)
            seen_sector_ids.add(sec.sector_id)
            ok_sectors.append(sec)
    sector_ids = {s.sector_id for s in ok_sectors}

    ok_stocks: list[Stock] = []
    seen_symbols: set[str] = set()
    for stock in stocks:
        if not stock.symbol or not _SYMBOL_RE.match(stock.symbol):
            rejections.append(
                Rejection("stock", stock.symbol or "<empty>", "symbol not uppercase alphanumeric")
            )
        elif stock.symbol in seen_symbols:
            rejections.append(Rejection("stock", stock.symbol, "duplicate symbol"))
        elif stock.sector_id not in sector_ids:
            rejections.append(Rejection("stock", stock.symbol, "unknown sector"))
        else:
            seen_symbols.add(stock.symbol)
            ok_stocks.append(stock)

    if not ok_stocks:
        raise ValueError("empty universe")

    ok_news: list[NewsDoc] = []
    seen_docs: set[str] = set()
    for doc in news:
        if doc.doc_id in seen_docs:
            rejections.append(Rejection("news", doc.doc_id, "duplicate doc id"))
            continue
        if not isinstance(doc.timestamp, datetime):
            rejections.append(Rejection("news", doc.doc_id, "unparseable timestamp"))
            continue
        unknown = [m for m in doc.mentions if m not in seen_symbols]
        if unknown:
            rejections.append(Rejection("news", doc.doc_id, "unknown symbol"))
            continue
        seen_docs.add(doc.doc_id)
        ok_news.append(doc)

    ok_bars: list[OhlcBar] = []
    seen_bar_keys: set[tuple[str, datetime]] = set()
    for bar in bars:
        ident = f"{bar.symbol}@{bar.timestamp}"
        if bar.symbol not in seen_symbols:
            rejections.append(Rejection("bar", ident, "unknown symbol"))
            continue
        reason = bar_violation(bar)
        if reason is not None:
            rejections.append(Rejection("bar", ident, reason))
            continue
        key = (bar.symbol, bar.timestamp)
        if key in seen_bar_keys:
            rejections.append(Rejection("bar", ident, "duplicate (symbol, timestamp)"))
            continue
        seen_bar_keys.add(key)
        ok_bars.append(bar)

    dataset = Dataset(tuple(ok_stocks), tuple(ok_sectors), tuple(ok_news), tuple(ok_bars))
    return ValidationReport(dataset, tuple(rejections))


def _hit_key(hit: SearchHit):
    # media breaks the rare tie of equal score, timestamp and symbol; without
    # it the order would not be total and cross-engine byte comparison could
    # legitimately differ.
    return (-hit.score, _NegDatetime(hit.date), hit.symbol, hit.media)


class _NegDatetime:
    """Descending-datetime sort key helper."""

    __slots__ = ("dt",)

    def __init__(self, dt: datetime) -> None:
        self.dt = dt

    def __lt__(self, other: "_NegDatetime") -> bool:
        return self.dt > other.dt

    def __eq__(self, other: object) -> bool:
        return isinstance(other, _NegDatetime) and self.dt == other.dt


def canonical_order(rows: Sequence) -> tuple:
    """Sort query rows into the one total order every engine reports.

    Search hits sort by score descending, then timestamp descending, then
    symbol and media ascending. OHLC rows sort by symbol then timestamp
    ascending. The sort is stable and idempotent.
    """
    if not rows:
        return ()
    first = rows[0]
    if isinstance(first, SearchHit):
        return tuple(sorted(rows, key=_hit_key))
    return tuple(sorted(rows, key=lambda r: (r[0], r[1].timestamp)))
