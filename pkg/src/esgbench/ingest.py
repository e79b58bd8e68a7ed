"""File loaders, mention extraction, and the deterministic dataset generator.

On-disk formats:

* Sector map CSV, header ``symbol,name,sector``: one stock per row, the
  sector column carries the sector's display name.
* OHLC CSV, header ``symbol,timestamp,open,high,low,close,volume``:
  timestamps are ``YYYY-MM-DD HH:MM:SS[.ffffff]``, prices carry at most four
  fractional digits.
* News file: UTF-8, one JSON record per line with fields ``media``, ``date``
  and ``content``.

Stock mentions are not stored in the news file; they are materialized at
load time by a dictionary match of each stock's symbol and company name
against the article text (case-insensitive, longest match wins).

The generator replaces live news scraping: the same config always yields a
bit-identical dataset, and the fraction of articles containing an ESG term
is controlled exactly, so full-text recall is known in advance.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from datetime import datetime, timedelta
from decimal import Decimal, InvalidOperation
from pathlib import Path
from random import Random
from typing import Iterable, Sequence

from .model import (
    Dataset,
    EsgLexicon,
    NewsDoc,
    OhlcBar,
    Rejection,
    Sector,
    Stock,
    ValidationReport,
    validate_dataset,
)
from .textindex import tokenize

OHLC_HEADER = ["symbol", "timestamp", "open", "high", "low", "close", "volume"]
SECTOR_MAP_HEADER = ["symbol", "name", "sector"]

STOCKS_FILE = "stocks.csv"
NEWS_FILE = "news.ndjson"
BARS_FILE = "bars.csv"


def sector_slug(name: str) -> str:
    """Deterministic sector id derived from the display name."""
    return re.sub(r"[^a-z0-9]+", "-", name.lower()).strip("-")


# ---------------------------------------------------------------------------
# Mention extraction


class MentionMatcher:
    """Dictionary matcher linking article text to stock symbols.

    Candidate phrases are each stock's symbol and company name, tokenized
    with the shared analyzer. At any text position the longest matching
    phrase wins and the scan resumes after it.
    """

    def __init__(self, stocks: Iterable[Stock]) -> None:
        self._by_first: dict[str, list[tuple[tuple[str, ...], str]]] = {}
        for stock in stocks:
            for phrase in (tokenize(stock.symbol), tokenize(stock.name)):
                if not phrase:
                    continue
                entry = (tuple(phrase), stock.symbol)
                bucket = self._by_first.setdefault(phrase[0], [])
                if entry not in bucket:
                    bucket.append(entry)
        for bucket in self._by_first.values():
            bucket.sort(key=lambda e: (-len(e[0]), e[0]))

    def extract(self, content: str) -> frozenset[str]:
        tokens = tokenize(content)
        found: set[str] = set()
        i = 0
        n = len(tokens)
        while i < n:
            bucket = self._by_first.get(tokens[i])
            if bucket:
                for phrase, symbol in bucket:
                    end = i + len(phrase)
                    if end <= n and tuple(tokens[i:end]) == phrase:
                        found.add(symbol)
                        i = end
                        break
                else:
                    i += 1
            else:
                i += 1
        return frozenset(found)


# ---------------------------------------------------------------------------
# Loaders


def load_sector_map(path: str | Path) -> tuple[list[Stock], list[Sector], list[Rejection]]:
    """Read the ``symbol,name,sector`` CSV; sectors appear in first-use order."""
    path = Path(path)
    rejections: list[Rejection] = []
    stocks: list[Stock] = []
    sectors: list[Sector] = []
    seen_sectors: dict[str, Sector] = {}
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or [c.strip() for c in lines[0].split(",")] != SECTOR_MAP_HEADER:
        raise ValueError(f"{path}: expected header {','.join(SECTOR_MAP_HEADER)}")
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 3:
            rejections.append(Rejection("stock", f"{path.name}:{lineno}", "wrong column count"))
            continue
        symbol, name, sector_name = (p.strip() for p in parts)
        if not sector_name:
            rejections.append(Rejection("stock", f"{path.name}:{lineno}", "missing field: sector"))
            continue
        sector = seen_sectors.get(sector_name)
        if sector is None:
            sector = Sector(sector_slug(sector_name), sector_name)
            seen_sectors[sector_name] = sector
            sectors.append(sector)
        stocks.append(Stock(symbol, name, sector.sector_id))
    return stocks, sectors, rejections


def load_ohlc_csvs(paths: Sequence[str | Path]) -> tuple[list[OhlcBar], list[Rejection]]:
    """Read and concatenate OHLC CSVs, keeping the first of duplicate keys."""
    bars: list[OhlcBar] = []
    rejections: list[Rejection] = []
    seen: set[tuple[str, datetime]] = set()
    for path in paths:
        path = Path(path)
        lines = path.read_text(encoding="utf-8").splitlines()
        if not lines or [c.strip() for c in lines[0].split(",")] != OHLC_HEADER:
            raise ValueError(f"{path}: expected header {','.join(OHLC_HEADER)}")
        for lineno, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            ident = f"{path.name}:{lineno}"
            parts = line.split(",")
            if len(parts) != 7:
                rejections.append(Rejection("bar", ident, "wrong column count"))
                continue
            symbol = parts[0].strip()
            try:
                ts = datetime.fromisoformat(parts[1].strip())
            except ValueError:
                rejections.append(Rejection("bar", ident, "invalid timestamp"))
                continue
            prices = {}
            bad = None
            for field_name, raw in zip(("open", "high", "low", "close"), parts[2:6]):
                try:
                    prices[field_name] = Decimal(raw.strip())
                except InvalidOperation:
                    bad = f"invalid {field_name}"
                    break
            if bad:
                rejections.append(Rejection("bar", ident, bad))
                continue
            try:
                volume = int(parts[6].strip())
            except ValueError:
                rejections.append(Rejection("bar", ident, "invalid volume"))
                continue
            key = (symbol, ts)
            if key in seen:
                continue  # duplicate key: first occurrence wins, silently
            seen.add(key)
            bars.append(OhlcBar(symbol, ts, prices["open"], prices["high"], prices["low"], prices["close"], volume))
    return bars, rejections


def load_news(path: str | Path, stocks: Iterable[Stock]) -> tuple[list[NewsDoc], list[Rejection]]:
    """Read newline-delimited news records and materialize stock mentions."""
    path = Path(path)
    matcher = MentionMatcher(stocks)
    docs: list[NewsDoc] = []
    rejections: list[Rejection] = []
    seq = 0
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        ident = f"{path.name}:{lineno}"
        try:
            record = json.loads(line)
        except json.JSONDecodeError:
            rejections.append(Rejection("news", ident, "invalid json"))
            continue
        missing = [f for f in ("media", "date", "content") if f not in record]
        if missing:
            rejections.append(Rejection("news", ident, f"missing field: {missing[0]}"))
            continue
        try:
            ts = datetime.fromisoformat(str(record["date"]))
        except ValueError:
            rejections.append(Rejection("news", ident, "invalid date"))
            continue
        content = str(record["content"])
        docs.append(
            NewsDoc(
                doc_id=f"news-{seq:06d}",
                media=str(record["media"]),
                timestamp=ts,
                content=content,
                mentions=matcher.extract(content),
            )
        )
        seq += 1
    return docs, rejections


def load_dataset(directory: str | Path) -> ValidationReport:
    """Load stocks.csv, news.ndjson and bars.csv from a directory and validate."""
    directory = Path(directory)
    stocks, sectors, rej_s = load_sector_map(directory / STOCKS_FILE)
    bars, rej_b = load_ohlc_csvs([directory / BARS_FILE])
    news, rej_n = load_news(directory / NEWS_FILE, stocks)
    report = validate_dataset(stocks, sectors, news, bars)
    return ValidationReport(report.dataset, tuple(rej_s + rej_n + rej_b) + report.rejections)


def write_dataset(dataset: Dataset, directory: str | Path) -> list[Path]:
    """Write a dataset in the three-file on-disk layout. Returns written paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    sector_names = {s.sector_id: s.name for s in dataset.sectors}

    stocks_path = directory / STOCKS_FILE
    lines = [",".join(SECTOR_MAP_HEADER)]
    lines += [f"{s.symbol},{s.name},{sector_names[s.sector_id]}" for s in dataset.stocks]
    stocks_path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    news_path = directory / NEWS_FILE
    with news_path.open("w", encoding="utf-8") as fh:
        for doc in dataset.news:
            fh.write(
                json.dumps(
                    {
                        "media": doc.media,
                        "date": doc.timestamp.isoformat(sep=" "),
                        "content": doc.content,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )

    bars_path = directory / BARS_FILE
    lines = [",".join(OHLC_HEADER)]
    lines += [
        f"{b.symbol},{b.timestamp.isoformat(sep=' ')},{b.open},{b.high},{b.low},{b.close},{b.volume}"
        for b in dataset.bars
    ]
    bars_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return [stocks_path, news_path, bars_path]


# ---------------------------------------------------------------------------
# Synthetic data generator

# Word pools are pairwise disjoint and disjoint from the default ESG lexicon,
# so a generated article matches the lexicon iff a term was embedded on
# purpose, and a stock is mentioned iff its phrase was spliced in.
_NAME_FIRST = (
    "apex", "vertex", "summit", "nova", "orion", "zenith", "delta", "titan",
    "argent", "borealis", "cascade", "meridian", "pinnacle", "quantum", "solstice",
    "aurora", "catalyst", "dynamo", "ember", "falcon", "granite", "horizon",
    "iridium", "juniper", "krypton", "lumen", "monarch", "nimbus", "obsidian",
    "paragon", "quartz", "radiant", "sterling", "tundra", "umber", "vanguard",
    "willow", "xenon", "yonder", "zephyr",
)
_NAME_SECOND = (
    "steel", "motors", "pharma", "textiles", "cement", "chemicals", "foods",
    "logistics", "telecom", "software", "agro", "mines", "power", "shipping",
    "breweries", "plastics", "fertilizers", "paints", "tyres", "sugar",
    "papers", "glass", "cables", "pumps", "forgings", "alloys", "ceramics",
    "dairy", "refineries", "packaging",
)
_FILLER = (
    "the", "market", "reported", "today", "that", "quarterly", "results",
    "were", "announced", "with", "investors", "watching", "shares", "trading",
    "after", "analysts", "expected", "growth", "in", "revenue", "profit",
    "during", "session", "while", "board", "approved", "plan", "for",
    "expansion", "amid", "strong", "demand", "across", "regions", "officials",
    "said", "output", "rose", "slightly", "compared", "previous", "period",
    "guidance", "remains", "unchanged", "pending", "regulatory", "review",
    "volumes", "climbed", "exchange", "filings", "showed", "margin", "outlook",
    "steady", "despite", "costs", "prices", "moved", "higher", "lower",
    "traders", "noted", "activity", "midday", "closing", "early", "late",
)
_SECTOR_NAMES = (
    "Metals and Mining", "Financial Services", "Information Technology",
    "Energy", "Healthcare", "Consumer Goods", "Industrials", "Utilities",
    "Real Estate", "Telecommunications", "Materials", "Transportation",
)
_MEDIA_POOL = (
    "Market Daily", "Finance Wire", "Trade Journal", "Business Standard Desk",
    "Equity Pulse", "Sector Watch", "Capital Chronicle", "Exchange Herald",
)

_BASE_DATE = datetime(2023, 7, 1)
_TRADING_OPEN_S = 9 * 3600 + 15 * 60  # 09:15
_TRADING_SPAN_S = 375 * 60  # through 15:30


@dataclass(frozen=True, slots=True)
class GeneratorConfig:
    seed: int = 42
    n_stocks: int = 50
    n_sectors: int = 5
    n_news: int = 10_000
    days: int = 42
    bars_per_day: int = 8
    esg_fraction: float = 0.02

    def validate(self) -> None:
        if self.n_stocks < 1:
            raise ValueError("n_stocks must be at least 1")
        if self.n_sectors < 1:
            raise ValueError("n_sectors must be at least 1")
        if self.n_sectors > self.n_stocks:
            raise ValueError("n_sectors cannot exceed n_stocks")
        if self.days < 1 or self.bars_per_day < 1:
            raise ValueError("days and bars_per_day must be at least 1")
        if not 0.0 <= self.esg_fraction <= 1.0:
            raise ValueError("esg_fraction must be within [0, 1]")
        if self.n_news < 0:
            raise ValueError("n_news cannot be negative")


def _quant(value: float) -> Decimal:
    return Decimal(f"{value:.4f}")


def _make_stocks(rng: Random, config: GeneratorConfig) -> tuple[list[Stock], list[Sector]]:
    sectors = []
    for i in range(config.n_sectors):
        name = _SECTOR_NAMES[i] if i < len(_SECTOR_NAMES) else f"Sector {i + 1}"
        sectors.append(Sector(sector_slug(name), name))
    names: list[str] = []
    used: set[str] = set()
    while len(names) < config.n_stocks:
        name = f"{rng.choice(_NAME_FIRST).capitalize()} {rng.choice(_NAME_SECOND).capitalize()}"
        if name not in used:
            used.add(name)
            names.append(name)
    stocks = []
    used_symbols: set[str] = set()
    for i, name in enumerate(names):
        first, second = name.split(" ")
        symbol = (first[:3] + second[:3]).upper()
        if symbol in used_symbols:
            n = 2
            while f"{symbol}{n}" in used_symbols:
                n += 1
            symbol = f"{symbol}{n}"
        used_symbols.add(symbol)
        stocks.append(Stock(symbol, name, sectors[i % config.n_sectors].sector_id))
    return stocks, sectors


def _make_bars(rng: Random, config: GeneratorConfig, stocks: Sequence[Stock]) -> list[OhlcBar]:
    step_s = max(1, _TRADING_SPAN_S // config.bars_per_day)
    bars: list[OhlcBar] = []
    for stock in stocks:
        close = rng.uniform(50.0, 2500.0)
        for day in range(config.days):
            day_start = _BASE_DATE + timedelta(days=day)
            for slot in range(config.bars_per_day):
                ts = day_start + timedelta(seconds=_TRADING_OPEN_S + slot * step_s)
                open_ = close
                close = open_ * (1.0 + rng.uniform(-0.01, 0.01))
                open_q, close_q = _quant(open_), _quant(close)
                spread = _quant(open_ * rng.uniform(0.0, 0.003))
                bars.append(
                    OhlcBar(
                        symbol=stock.symbol,
                        timestamp=ts,
                        open=open_q,
                        high=max(open_q, close_q) + spread,
                        low=min(open_q, close_q) - spread,
                        close=close_q,
                        volume=rng.randint(1_000, 500_000),
                    )
                )
    return bars


def _make_news(
    rng: Random,
    config: GeneratorConfig,
    stocks: Sequence[Stock],
    lexicon: EsgLexicon,
) -> list[NewsDoc]:
    terms = sorted(lexicon.terms)
    filler = [w for w in _FILLER if w not in lexicon.terms]
    name_words = set(_NAME_FIRST) | set(_NAME_SECOND)
    name_words.update(t for s in stocks for t in tokenize(s.symbol))
    clash = sorted(name_words & set(lexicon.terms))
    if clash:
        raise ValueError(f"lexicon terms collide with company names: {clash}")

    n_esg = round(config.esg_fraction * config.n_news)
    esg_rows = set(rng.sample(range(config.n_news), n_esg)) if config.n_news else set()

    docs: list[NewsDoc] = []
    for i in range(config.n_news):
        words = [rng.choice(filler) for _ in range(rng.randint(8, 24))]
        mentioned = rng.sample(stocks, rng.randint(1, min(3, len(stocks))))
        for stock in mentioned:
            phrase = stock.name if rng.random() < 0.7 else stock.symbol
            words.insert(rng.randrange(len(words) + 1), phrase)
        if i in esg_rows:
            term = rng.choice(terms)
            for _ in range(rng.randint(1, 3)):
                words.insert(rng.randrange(len(words) + 1), term)
        day = rng.randrange(config.days)
        ts = _BASE_DATE + timedelta(
            days=day, seconds=rng.randrange(86400), microseconds=rng.randrange(1_000_000)
        )
        docs.append(
            NewsDoc(
                doc_id=f"news-{i:06d}",
                media=rng.choice(_MEDIA_POOL),
                timestamp=ts,
                content=" ".join(words),
                mentions=frozenset(s.symbol for s in mentioned),
            )
        )
    return docs


def generate(config: GeneratorConfig, lexicon: EsgLexicon | None = None) -> Dataset:
    """Produce a synthetic dataset; the same config is always bit-identical.

    Stocks are assigned to sectors round-robin, bars satisfy the OHLC
    invariants by construction, and exactly ``round(esg_fraction * n_news)``
    articles embed a lexicon term.
    """
    config.validate()
    lexicon = lexicon or EsgLexicon.default()
    rng = Random(config.seed)
    stocks, sectors = _make_stocks(rng, config)
    bars = _make_bars(rng, config, stocks)
    news = _make_news(rng, config, stocks, lexicon)
    return Dataset(tuple(stocks), tuple(sectors), tuple(news), tuple(bars))
