"""Documents, queries, relevance judgments, tokenization, and query splits."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from axiomdiag.errors import DataError

# Only sentence punctuation is stripped from token edges. Brackets and
# underscores stay so tokens like "a(n)" and "__" survive intact.
_EDGE_PUNCT = ".,;:!?\"'`"


@dataclass(frozen=True)
class TokenizerConfig:
    lowercase: bool = True
    strip_punctuation: bool = True
    max_doc_tokens: int = 512

    def __post_init__(self):
        if self.max_doc_tokens < 1:
            raise ValueError("max_doc_tokens must be >= 1")


@dataclass(frozen=True, slots=True)
class Document:
    id: str
    tokens: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True, slots=True)
class Query:
    id: str
    tokens: tuple[str, ...]

    def distinct_terms(self) -> tuple[str, ...]:
        """Distinct query terms in first-occurrence order."""
        return tuple(dict.fromkeys(self.tokens))


@dataclass(frozen=True, slots=True)
class QrelEntry:
    query_id: str
    doc_id: str
    grade: int


def tokenize(text: str, cfg: TokenizerConfig) -> tuple[str, ...]:
    """Split raw text into tokens: whitespace split, optional case folding and
    edge punctuation stripping, truncated to cfg.max_doc_tokens."""
    out = []
    for raw in text.split():
        token = raw.lower() if cfg.lowercase else raw
        if cfg.strip_punctuation:
            token = token.strip(_EDGE_PUNCT)
        if token:
            out.append(token)
        if len(out) >= cfg.max_doc_tokens:
            break
    return tuple(out)


def term_count(term: str, tokens) -> int:
    """Number of occurrences of term in a token sequence."""
    return sum(1 for t in tokens if t == term)


def idf(num_docs: int, doc_freq: int) -> float:
    """ln(N/df); an unseen term (df=0) gets a half-count floor ln(N/0.5)."""
    if num_docs < 1:
        raise ValueError("num_docs must be >= 1")
    if doc_freq < 0 or doc_freq > num_docs:
        raise ValueError("doc_freq out of range")
    if doc_freq == 0:
        return math.log(num_docs / 0.5)
    return math.log(num_docs / doc_freq)


def split_queries(queries, seed: int, dev_fraction: float):
    """Deterministically partition queries into (dev, test) sets.

    |dev| = round(dev_fraction * total), rounding half up. Both halves are
    returned sorted by query id.
    """
    if not 0 < dev_fraction < 1:
        raise ValueError("dev_fraction must be in (0, 1)")
    ordered = sorted(queries, key=lambda q: q.id)
    rng = random.Random(seed)
    rng.shuffle(ordered)
    n_dev = int(dev_fraction * len(ordered) + 0.5)
    dev = sorted(ordered[:n_dev], key=lambda q: q.id)
    test = sorted(ordered[n_dev:], key=lambda q: q.id)
    return dev, test


def load_corpus(path, cfg: TokenizerConfig) -> dict[str, Document]:
    """Read a TSV corpus (doc_id <tab> raw text) into tokenized documents."""
    docs: dict[str, Document] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t", 1)
            doc_id = parts[0]
            text = parts[1] if len(parts) > 1 else ""
            if not doc_id:
                raise DataError(f"{path}:{lineno}: empty document id")
            if doc_id in docs:
                raise DataError(f"{path}:{lineno}: duplicate document id {doc_id!r}")
            docs[doc_id] = Document(doc_id, tokenize(text, cfg))
    return docs


def load_queries(path, cfg: TokenizerConfig) -> dict[str, Query]:
    """Read a TSV query file (query_id <tab> raw text)."""
    queries: dict[str, Query] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t", 1)
            if len(parts) < 2:
                raise DataError(f"{path}:{lineno}: expected 'query_id<TAB>text'")
            qid, text = parts
            if qid in queries:
                raise DataError(f"{path}:{lineno}: duplicate query id {qid!r}")
            tokens = tokenize(text, cfg)
            if not tokens:
                raise DataError(f"{path}:{lineno}: query {qid!r} has no tokens")
            queries[qid] = Query(qid, tokens)
    return queries


def load_qrels(path) -> dict[str, dict[str, int]]:
    """Read whitespace-separated TREC qrels: query_id 0 doc_id grade."""
    qrels: dict[str, dict[str, int]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 4:
                raise DataError(f"{path}:{lineno}: expected 4 qrels fields")
            qid, _, did, grade_str = parts
            try:
                grade = int(grade_str)
            except ValueError:
                raise DataError(f"{path}:{lineno}: bad grade {grade_str!r}") from None
            if grade < 0:
                raise DataError(f"{path}:{lineno}: negative grade")
            per_query = qrels.setdefault(qid, {})
            if did in per_query:
                raise DataError(f"{path}:{lineno}: duplicate qrel ({qid}, {did})")
            per_query[did] = grade
    return qrels
