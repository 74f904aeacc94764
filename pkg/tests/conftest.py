import random

import pytest

from axiomdiag.corpus import Document, Query
from axiomdiag.embeddings import EmbeddingTable
from axiomdiag.index import build_index


def make_docs(token_lists, prefix="d"):
    """Documents d1, d2, ... from raw token lists."""
    return {
        f"{prefix}{i}": Document(f"{prefix}{i}", tuple(tokens))
        for i, tokens in enumerate(token_lists, start=1)
    }


def make_query(tokens, qid="q1"):
    return Query(qid, tuple(tokens))


def random_embedding_table(rng: random.Random, vocabulary, dim=4, oov_rate=0.1):
    table = EmbeddingTable(dim=dim)
    for term in vocabulary:
        if rng.random() < oov_rate:
            continue
        table.add(term, [rng.uniform(-1, 1) for _ in range(dim)])
    return table


def random_corpus(rng: random.Random, num_docs, num_queries, vocab_size,
                  min_len=3, max_len=12):
    """A small synthetic corpus with queries drawn from the same vocabulary."""
    vocabulary = [f"t{i}" for i in range(vocab_size)]
    docs = {}
    for i in range(num_docs):
        length = rng.randint(min_len, max_len)
        tokens = tuple(rng.choice(vocabulary) for _ in range(length))
        docs[f"d{i:03d}"] = Document(f"d{i:03d}", tokens)
    queries = {}
    for i in range(num_queries):
        n_terms = rng.randint(1, 4)
        tokens = tuple(rng.choice(vocabulary) for _ in range(n_terms))
        queries[f"q{i:02d}"] = Query(f"q{i:02d}", tokens)
    return docs, queries, vocabulary


@pytest.fixture
def two_doc_fixture():
    """The hand-checked two-document Dirichlet corpus."""
    docs = {"d1": Document("d1", ("a", "b")), "d2": Document("d2", ("a", "a"))}
    idx, stats = build_index(docs.values())
    return docs, idx, stats
