"""Positional inverted index, Dirichlet query-likelihood scoring, top-k
retrieval, and minimum query-term pair distance."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

from axiomdiag.corpus import Query
from axiomdiag.errors import DataError


@dataclass
class InvertedIndex:
    # term -> {doc_id -> sorted tuple of token positions}
    postings: dict[str, dict[str, tuple[int, ...]]] = field(default_factory=dict)
    doc_lengths: dict[str, int] = field(default_factory=dict)

    def term_frequency(self, term: str, doc_id: str) -> int:
        plist = self.postings.get(term)
        if plist is None:
            return 0
        positions = plist.get(doc_id)
        return len(positions) if positions else 0

    def positions(self, term: str, doc_id: str) -> tuple[int, ...]:
        plist = self.postings.get(term)
        if plist is None:
            return ()
        return plist.get(doc_id, ())


@dataclass
class CollectionStats:
    total_tokens: int = 0
    collection_tf: Counter = field(default_factory=Counter)
    doc_freq: Counter = field(default_factory=Counter)
    num_docs: int = 0


def build_index(documents) -> tuple[InvertedIndex, CollectionStats]:
    """Index an iterable of Documents; rejects duplicate doc ids."""
    idx = InvertedIndex()
    stats = CollectionStats()
    for doc in documents:
        if doc.id in idx.doc_lengths:
            raise DataError(f"duplicate document id {doc.id!r}")
        positions: dict[str, list[int]] = {}
        for pos, term in enumerate(doc.tokens):
            positions.setdefault(term, []).append(pos)
        idx.doc_lengths[doc.id] = len(doc.tokens)
        for term, plist in positions.items():
            idx.postings.setdefault(term, {})[doc.id] = tuple(plist)
            stats.collection_tf[term] += len(plist)
            stats.doc_freq[term] += 1
        stats.total_tokens += len(doc.tokens)
        stats.num_docs += 1
    return idx, stats


def _ql_sum(query_tokens, tf_of, doc_len: int, stats: CollectionStats, mu: float) -> float:
    """Shared Dirichlet-smoothed log-likelihood summation.

    Iterates query tokens in sequence order so indexed and ad-hoc documents
    score through the identical float path. Query terms absent from the
    collection contribute nothing.
    """
    if mu <= 0:
        raise ValueError("mu must be > 0")
    score = 0.0
    for term in query_tokens:
        ctf = stats.collection_tf.get(term, 0)
        if ctf == 0:
            continue
        p_coll = ctf / stats.total_tokens
        tf = tf_of(term)
        score += math.log((tf + mu * p_coll) / (doc_len + mu))
    return score


def ql_score(query: Query, doc_id: str, idx: InvertedIndex, stats: CollectionStats, mu: float) -> float:
    """Dirichlet-smoothed query likelihood of an indexed document."""
    if doc_id not in idx.doc_lengths:
        raise DataError(f"document {doc_id!r} is not indexed")
    doc_len = idx.doc_lengths[doc_id]
    return _ql_sum(query.tokens, lambda t: idx.term_frequency(t, doc_id), doc_len, stats, mu)


def ql_score_tokens(query: Query, doc_tokens, stats: CollectionStats, mu: float) -> float:
    """Dirichlet-smoothed query likelihood of an arbitrary token sequence
    (used for generated documents that are never indexed)."""
    counts = Counter(doc_tokens)
    return _ql_sum(query.tokens, lambda t: counts.get(t, 0), len(doc_tokens), stats, mu)


def retrieve_topk(query: Query, k: int, idx: InvertedIndex, stats: CollectionStats, mu: float):
    """Rank the documents matching at least one query term.

    Returns up to k (doc_id, score) pairs, descending by score, ties broken
    by ascending doc_id.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    candidates: set[str] = set()
    for term in dict.fromkeys(query.tokens):
        plist = idx.postings.get(term)
        if plist:
            candidates.update(plist.keys())
    scored = [(doc_id, ql_score(query, doc_id, idx, stats, mu)) for doc_id in candidates]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[:k]


def _min_gap(a: tuple[int, ...], b: tuple[int, ...]) -> int:
    """Minimum absolute difference between two sorted position lists."""
    best = None
    i = j = 0
    while i < len(a) and j < len(b):
        gap = abs(a[i] - b[j])
        if best is None or gap < best:
            best = gap
        if a[i] < b[j]:
            i += 1
        else:
            j += 1
    return best


def min_query_pair_distance(query: Query, doc_id: str, idx: InvertedIndex):
    """Minimum token distance between occurrences of two distinct query terms
    in the document; None when fewer than two distinct query terms occur."""
    if doc_id not in idx.doc_lengths:
        raise DataError(f"document {doc_id!r} is not indexed")
    present = [idx.positions(t, doc_id) for t in dict.fromkeys(query.tokens)]
    present = [p for p in present if p]
    if len(present) < 2:
        return None
    best = None
    for i in range(len(present)):
        for j in range(i + 1, len(present)):
            gap = _min_gap(present[i], present[j])
            if best is None or gap < best:
                best = gap
    return best
