"""Text analysis, inverted index, and the two full-text scoring families.

The analyzer mimics a standard tokenizer with a lowercase filter: text is
split on any non-alphanumeric character and lowercased, with no stemming and
no stop words. All engines share it, so their matching semantics are
identical and result sets can be compared exactly.

Two scorers are provided:

* BM25 (used by the document and graph engines), with
  ``idf = ln(1 + (N - df + 0.5) / (df + 0.5))`` and the usual
  tf saturation / length normalization controlled by ``k1`` and ``b``.
* A tsvector-style frequency rank (used by the relational engine):
  ``sum(tf / (tf + 1) for matched terms) / (1 + ln(doc_len))``.
  It is deliberately a different formula family, so the relational ranking
  order differs from the other two engines while the matched set does not.

Index file format (``save_index`` / ``load_index``), all integers
little-endian:

    magic          5 bytes  b"ESGX1"
    doc_count      u32
    avg_doc_len    f64
    doc table      doc_count entries, in insertion order:
                       u16 doc_id byte length, doc_id utf-8, u32 token count
    term_count     u32
    term table     term_count entries, terms sorted ascending:
                       u16 term byte length, term utf-8, u32 posting count,
                       postings sorted by doc_id:
                           u32 doc ordinal, u32 tf, u32 n_positions,
                           n_positions * u32 token position

Writing the same index twice produces identical bytes.
"""

from __future__ import annotations

import math
import re
import struct
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

DEFAULT_K1 = 1.2
DEFAULT_B = 0.75

_MAGIC = b"ESGX1"


def tokenize(text: str) -> list[str]:
    """Split on non-alphanumeric characters, drop empties, lowercase.

    The position of a token is its index in the returned list.
    """
    return _TOKEN_RE.findall(text.lower())


def build_token_vector(text: str) -> dict[str, int]:
    """Precomputed term -> frequency map, the relational full-text column."""
    return dict(Counter(tokenize(text)))


@dataclass
class InvertedIndex:
    """Term postings plus the per-document statistics BM25 needs.

    ``postings`` maps term -> list of (doc_id, tf, positions) sorted by
    doc_id; ``doc_ids`` preserves insertion order and doubles as the
    ordinal table for serialization.
    """

    postings: dict[str, list[tuple[str, int, tuple[int, ...]]]] = field(default_factory=dict)
    doc_lengths: dict[str, int] = field(default_factory=dict)
    doc_ids: tuple[str, ...] = ()
    doc_count: int = 0
    avg_doc_len: float = 0.0


def build_index(docs: Iterable[tuple[str, str]]) -> InvertedIndex:
    """Index (doc_id, text) pairs. Duplicate doc ids are an error."""
    postings: dict[str, list[tuple[str, int, tuple[int, ...]]]] = {}
    doc_lengths: dict[str, int] = {}
    order: list[str] = []
    for doc_id, text in docs:
        if doc_id in doc_lengths:
            raise ValueError(f"duplicate doc_id {doc_id!r}")
        tokens = tokenize(text)
        doc_lengths[doc_id] = len(tokens)
        order.append(doc_id)
        by_term: dict[str, list[int]] = {}
        for pos, tok in enumerate(tokens):
            by_term.setdefault(tok, []).append(pos)
        for term, positions in by_term.items():
            postings.setdefault(term, []).append((doc_id, len(positions), tuple(positions)))
    for plist in postings.values():
        plist.sort(key=lambda p: p[0])
    n = len(order)
    avg = (sum(doc_lengths.values()) / n) if n else 0.0
    return InvertedIndex(postings, doc_lengths, tuple(order), n, avg)


def bm25_term_weight(
    tf: int,
    df: int,
    doc_len: int,
    doc_count: int,
    avg_doc_len: float,
    k1: float = DEFAULT_K1,
    b: float = DEFAULT_B,
) -> float:
    """BM25 contribution of one term occurrence profile in one document.

    Both BM25-scoring engines call this single kernel, so their scores are
    bit-identical, not merely close.
    """
    idf = math.log(1.0 + (doc_count - df + 0.5) / (df + 0.5))
    return idf * (tf * (k1 + 1.0)) / (tf + k1 * (1.0 - b + b * doc_len / avg_doc_len))


def bm25_score(
    index: InvertedIndex,
    terms: Sequence[str],
    doc_id: str,
    k1: float = DEFAULT_K1,
    b: float = DEFAULT_B,
) -> float:
    """Score one document against the query terms. Unknown doc_id is an error."""
    if doc_id not in index.doc_lengths:
        raise KeyError(f"unknown doc_id {doc_id!r}")
    doc_len = index.doc_lengths[doc_id]
    score = 0.0
    for term in terms:
        plist = index.postings.get(term)
        if not plist:
            continue
        for pid, tf, _ in plist:
            if pid == doc_id:
                score += bm25_term_weight(
                    tf, len(plist), doc_len, index.doc_count, index.avg_doc_len, k1, b
                )
                break
    return score


def tsrank_score(
    token_vector: Mapping[str, int],
    terms: Sequence[str],
    doc_len: int | None = None,
) -> float:
    """Frequency rank of a token vector against the query terms.

    Matched terms contribute ``tf / (tf + 1)``; the sum is damped by
    ``1 + ln(doc_len)``. A document with no matching term scores 0. Scores
    stay below 1 for natural documents; the bound is the number of matched
    terms in the degenerate case of a document made only of query terms.
    """
    if doc_len is None:
        doc_len = sum(token_vector.values())
    total = 0.0
    for term in terms:
        tf = token_vector.get(term)
        if tf:
            total += tf / (tf + 1.0)
    if total == 0.0 or doc_len == 0:
        return 0.0
    return total / (1.0 + math.log(doc_len))


def search(
    index: InvertedIndex,
    terms: Sequence[str],
    k: int | None,
    k1: float = DEFAULT_K1,
    b: float = DEFAULT_B,
) -> list[tuple[str, float]]:
    """Top-k (doc_id, score) over documents containing at least one term.

    Scores accumulate term-at-a-time in query order. Ties break by doc_id
    ascending; ``k=None`` returns every matching document.
    """
    if k is not None and k < 1:
        raise ValueError("k must be at least 1")
    scores: dict[str, float] = {}
    doc_lengths = index.doc_lengths
    n = index.doc_count
    avg = index.avg_doc_len
    for term in terms:
        plist = index.postings.get(term)
        if not plist:
            continue
        df = len(plist)
        for doc_id, tf, _ in plist:
            w = bm25_term_weight(tf, df, doc_lengths[doc_id], n, avg, k1, b)
            scores[doc_id] = scores.get(doc_id, 0.0) + w
    ranked = sorted(scores.items(), key=lambda it: (-it[1], it[0]))
    if k is not None:
        ranked = ranked[:k]
    return ranked


def save_index(index: InvertedIndex, path: str | Path) -> None:
    """Write the index in the versioned binary layout described above."""
    ordinal = {doc_id: i for i, doc_id in enumerate(index.doc_ids)}
    out = bytearray()
    out += _MAGIC
    out += struct.pack("<I", index.doc_count)
    out += struct.pack("<d", index.avg_doc_len)
    for doc_id in index.doc_ids:
        raw = doc_id.encode("utf-8")
        out += struct.pack("<H", len(raw))
        out += raw
        out += struct.pack("<I", index.doc_lengths[doc_id])
    terms = sorted(index.postings)
    out += struct.pack("<I", len(terms))
    for term in terms:
        raw = term.encode("utf-8")
        out += struct.pack("<H", len(raw))
        out += raw
        plist = index.postings[term]
        out += struct.pack("<I", len(plist))
        for doc_id, tf, positions in plist:
            out += struct.pack("<III", ordinal[doc_id], tf, len(positions))
            out += struct.pack(f"<{len(positions)}I", *positions)
    Path(path).write_bytes(bytes(out))


def load_index(path: str | Path) -> InvertedIndex:
    """Read an index written by save_index. Bad magic is an error."""
    data = Path(path).read_bytes()
    if data[: len(_MAGIC)] != _MAGIC:
        raise ValueError(f"not an index file (bad magic): {path}")
    view = memoryview(data)
    off = len(_MAGIC)

    def u16() -> int:
        nonlocal off
        (v,) = struct.unpack_from("<H", view, off)
        off += 2
        return v

    def u32() -> int:
        nonlocal off
        (v,) = struct.unpack_from("<I", view, off)
        off += 4
        return v

    doc_count = u32()
    (avg,) = struct.unpack_from("<d", view, off)
    off += 8
    doc_ids: list[str] = []
    doc_lengths: dict[str, int] = {}
    for _ in range(doc_count):
        ln = u16()
        doc_id = bytes(view[off : off + ln]).decode("utf-8")
        off += ln
        doc_lengths[doc_id] = u32()
        doc_ids.append(doc_id)
    postings: dict[str, list[tuple[str, int, tuple[int, ...]]]] = {}
    for _ in range(u32()):
        ln = u16()
        term = bytes(view[off : off + ln]).decode("utf-8")
        off += ln
        plist: list[tuple[str, int, tuple[int, ...]]] = []
        for _ in range(u32()):
            ord_, tf, npos = struct.unpack_from("<III", view, off)
            off += 12
            positions = struct.unpack_from(f"<{npos}I", view, off)
            off += 4 * npos
            plist.append((doc_ids[ord_], tf, positions))
        postings[term] = plist
    return InvertedIndex(postings, doc_lengths, tuple(doc_ids), doc_count, avg)
