import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from esgbench.textindex import (
    bm25_score,
    build_index,
    build_token_vector,
    load_index,
    save_index,
    search,
    tokenize,
    tsrank_score,
)

from helpers import BruteForceBM25, oracle_tsrank


def random_corpus(n_docs: int, seed: int = 11) -> list[tuple[str, str]]:
    rng = random.Random(seed)
    vocab = ["esg", "carbon", "steel", "bank", "solar", "wind", "coal", "profit", "loss", "green"]
    return [
        (f"d{i:03d}", " ".join(rng.choice(vocab) for _ in range(rng.randint(3, 30))))
        for i in range(n_docs)
    ]


# ---------------------------------------------------------------------------
# analyzer


def test_tokenize_basic():
    assert tokenize("Tata Steel announces ESG targets") == ["tata", "steel", "announces", "esg", "targets"]


def test_tokenize_empty():
    assert tokenize("") == []


def test_tokenize_splits_on_punctuation():
    assert tokenize("CO2-emissions 2023") == ["co2", "emissions", "2023"]


@given(st.text(max_size=200))
def test_tokenize_is_idempotent(text):
    tokens = tokenize(text)
    assert tokenize(" ".join(tokens)) == tokens
    assert all(t == t.lower() and " " not in t for t in tokens)


def test_token_vector_counts_sum_to_length():
    tv = build_token_vector("esg esg carbon")
    assert tv == {"esg": 2, "carbon": 1}
    assert sum(tv.values()) == len(tokenize("esg esg carbon"))


# ---------------------------------------------------------------------------
# index construction


def test_build_index_hand_counted():
    idx = build_index([("d1", "esg now"), ("d2", "esg esg later")])
    assert [(d, tf) for d, tf, _ in idx.postings["esg"]] == [("d1", 1), ("d2", 2)]
    assert idx.avg_doc_len == pytest.approx(2.5, abs=1e-12)
    assert idx.doc_count == 2


def test_build_index_empty():
    idx = build_index([])
    assert idx.doc_count == 0
    assert search(idx, ["esg"], 5) == []


def test_build_index_duplicate_doc_id():
    with pytest.raises(ValueError, match="duplicate"):
        build_index([("d1", "a"), ("d1", "b")])


def test_postings_match_naive_scan_oracle():
    corpus = random_corpus(20)
    idx = build_index(corpus)
    for term in {t for _, text in corpus for t in text.split()}:
        expected = [(doc_id, text.split().count(term)) for doc_id, text in corpus if term in text.split()]
        got = [(d, tf) for d, tf, _ in idx.postings[term]]
        assert sorted(got) == sorted(expected)
    assert abs(idx.avg_doc_len - sum(len(t.split()) for _, t in corpus) / 20) < 1e-12


def test_posting_positions_point_at_the_term():
    idx = build_index([("d1", "carbon esg carbon")])
    (doc_id, tf, positions) = idx.postings["carbon"][0]
    assert (doc_id, tf, positions) == ("d1", 2, (0, 2))


# ---------------------------------------------------------------------------
# BM25


def test_bm25_absent_term_scores_zero():
    idx = build_index(random_corpus(5))
    assert bm25_score(idx, ["zzzunknown"], "d000") == 0.0


def test_bm25_single_doc_matches_direct_formula():
    idx = build_index([("d1", "esg")])
    # by hand: tf=1, dl=avgdl=1, so the saturation factor is exactly 1 and the
    # score reduces to the idf term.
    expected = math.log(1 + (1 - 1 + 0.5) / (1 + 0.5))
    assert bm25_score(idx, ["esg"], "d1", k1=1.2, b=0.75) == pytest.approx(expected, abs=1e-12)


def test_bm25_unknown_doc_is_error():
    idx = build_index([("d1", "esg")])
    with pytest.raises(KeyError):
        bm25_score(idx, ["esg"], "nope")


def test_bm25_matches_brute_force_oracle():
    corpus = random_corpus(20)
    idx = build_index(corpus)
    oracle = BruteForceBM25(corpus)
    for doc_id, _ in corpus:
        for terms in (["esg"], ["carbon", "steel"], ["green", "solar", "coal"]):
            assert bm25_score(idx, terms, doc_id) == pytest.approx(
                oracle.score(doc_id, terms), abs=1e-9
            )


@given(st.integers(2, 30), st.data())
def test_bm25_is_monotonic_in_tf(doc_len, data):
    """More query-term occurrences at fixed length never lower the score."""
    tf_low = data.draw(st.integers(1, doc_len - 1))
    tf_high = data.draw(st.integers(tf_low, doc_len))
    low = ["esg"] * tf_low + ["pad"] * (doc_len - tf_low)
    high = ["esg"] * tf_high + ["pad"] * (doc_len - tf_high)
    idx = build_index([("low", " ".join(low)), ("high", " ".join(high)), ("other", "esg pad")])
    assert bm25_score(idx, ["esg"], "high") >= bm25_score(idx, ["esg"], "low")


def test_adding_document_never_decreases_df():
    corpus = random_corpus(10)
    idx_before = build_index(corpus)
    idx_after = build_index(corpus + [("dnew", "esg steel")])
    assert idx_after.doc_count == idx_before.doc_count + 1
    for term, plist in idx_before.postings.items():
        assert len(idx_after.postings[term]) >= len(plist)


# ---------------------------------------------------------------------------
# tsrank


def test_tsrank_no_match_is_zero():
    assert tsrank_score({"steel": 3}, ["esg"]) == 0.0


def test_tsrank_single_token_doc():
    # (1/2) / (1 + ln 1) = 0.5
    assert tsrank_score({"esg": 1}, ["esg"]) == 0.5


def test_tsrank_fixture_scores_stay_below_one():
    docs = [
        "esg push gains momentum across large caps this quarter",
        "carbon capture pilot announced with emission cuts planned",
        "governance review finds gaps in reporting timelines",
        "renewable capacity addition beats the social housing plan",
        "markets drift sideways on light volumes",
        "sustainability bond issue draws strong environmental demand",
    ]
    terms = ["carbon", "emission", "esg", "governance", "renewable", "social", "sustainability"]
    scores = [tsrank_score(build_token_vector(d), terms) for d in docs]
    matched = [s for s in scores if s > 0]
    assert len(matched) == 5
    assert all(0.0 < s < 1.0 for s in matched)


def test_tsrank_matches_independent_recomputation():
    corpus = random_corpus(20, seed=5)
    terms = ["esg", "carbon", "green"]
    for _, text in corpus:
        assert tsrank_score(build_token_vector(text), terms) == pytest.approx(
            oracle_tsrank(text, terms), abs=1e-9
        )


@given(st.dictionaries(st.sampled_from(["esg", "carbon", "x", "y"]), st.integers(1, 50), max_size=4))
def test_tsrank_single_term_query_stays_in_unit_interval(tv):
    score = tsrank_score(tv, ["esg"])
    assert 0.0 <= score < 1.0


# ---------------------------------------------------------------------------
# search


def test_search_returns_all_matches_when_k_exceeds_them():
    idx = build_index([("d1", "esg a"), ("d2", "esg b"), ("d3", "esg c"), ("d4", "nothing here")])
    assert len(search(idx, ["esg"], 10)) == 3


def test_search_breaks_ties_by_doc_id():
    idx = build_index([("d2", "esg pad"), ("d1", "esg pad")])
    results = search(idx, ["esg"], 2)
    assert [d for d, _ in results] == ["d1", "d2"]
    assert results[0][1] == results[1][1]


def test_search_top5_matches_exhaustive_oracle():
    corpus = random_corpus(20, seed=3)
    idx = build_index(corpus)
    oracle = BruteForceBM25(corpus)
    terms = ["esg", "carbon"]
    got = search(idx, terms, 5)
    expected = oracle.top_k(terms, 5)
    assert [d for d, _ in got] == [d for d, _ in expected]
    for (_, s_got), (_, s_exp) in zip(got, expected):
        assert s_got == pytest.approx(s_exp, abs=1e-9)


def test_search_k_must_be_positive():
    idx = build_index([("d1", "esg")])
    with pytest.raises(ValueError):
        search(idx, ["esg"], 0)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.lists(st.sampled_from(["esg", "coal", "x"]), min_size=1, max_size=8), min_size=1, max_size=50))
def test_index_and_scores_match_oracle_on_small_corpora(doc_tokens):
    corpus = [(f"d{i:02d}", " ".join(toks)) for i, toks in enumerate(doc_tokens)]
    idx = build_index(corpus)
    oracle = BruteForceBM25(corpus)
    terms = ["esg", "coal"]
    got = search(idx, terms, None)
    expected = oracle.top_k(terms, None)
    assert [d for d, _ in got] == [d for d, _ in expected]
    for (_, a), (_, b) in zip(got, expected):
        assert a == pytest.approx(b, abs=1e-9)


# ---------------------------------------------------------------------------
# serialization


def test_index_round_trips_through_file(tmp_path):
    corpus = random_corpus(15, seed=9)
    idx = build_index(corpus)
    path = tmp_path / "news.idx"
    save_index(idx, path)
    loaded = load_index(path)
    assert loaded.postings == idx.postings
    assert loaded.doc_lengths == idx.doc_lengths
    assert loaded.doc_ids == idx.doc_ids
    assert loaded.doc_count == idx.doc_count
    assert loaded.avg_doc_len == idx.avg_doc_len


def test_index_file_bytes_are_reproducible(tmp_path):
    corpus = random_corpus(15, seed=9)
    p1, p2 = tmp_path / "a.idx", tmp_path / "b.idx"
    save_index(build_index(corpus), p1)
    save_index(build_index(corpus), p2)
    assert p1.read_bytes() == p2.read_bytes()
    assert p1.read_bytes()[:5] == b"ESGX1"


def test_load_index_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.idx"
    path.write_bytes(b"NOTME" + b"\x00" * 16)
    with pytest.raises(ValueError, match="magic"):
        load_index(path)
