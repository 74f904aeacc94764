"""The nine adapted retrieval heuristics: eligibility predicates, LNC2
document generation, and fulfilment checking.

Predicates operate on raw token sequences so they can serve as the naive
reference route; the extraction module has its own precomputed fast path.
Every predicate answers "is this ordered tuple a diagnostic instance", with
the first document being the one the heuristic expects to score
(weakly-)higher.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from axiomdiag.embeddings import EmbeddingTable, sigma_prime
from axiomdiag.errors import DataError

TFC1 = "TFC1"
TFC2 = "TFC2"
MTDC = "MTDC"
LNC1 = "LNC1"
LNC2 = "LNC2"
TP = "TP"
STMC1 = "STMC1"
STMC2 = "STMC2"
STMC3 = "STMC3"

ALL_AXIOMS = (TFC1, TFC2, MTDC, LNC1, LNC2, TP, STMC1, STMC2, STMC3)

# Strict axioms demand S0 > S1; the rest tolerate ties.
STRICT_AXIOMS = frozenset({TFC1, TP, STMC1, STMC3})
NON_STRICT_AXIOMS = frozenset({MTDC, LNC1, LNC2, STMC2})

SEMANTIC_AXIOMS = frozenset({STMC1, STMC2, STMC3})


@dataclass(frozen=True)
class AxiomParams:
    delta_len: int = 10
    delta_sim: float = 0.2
    max_tokens: int = 512
    epsilon: float = 1e-9

    def __post_init__(self):
        if self.delta_len < 0:
            raise ValueError("delta_len must be >= 0")
        if not 0 <= self.delta_sim <= 1:
            raise ValueError("delta_sim must be in [0, 1]")
        if self.max_tokens < 2:
            raise ValueError("max_tokens must be >= 2")
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")


@dataclass(frozen=True, slots=True)
class DiagnosticInstance:
    """One extracted instance: doc_ids[0] is the document the heuristic
    expects to score weakly-higher (for TFC2, doc_ids are in increasing
    query-term-count order)."""

    axiom: str
    query_id: str
    doc_ids: tuple[str, ...]
    # LNC2 only: ((generated_doc_id, generated_tokens),)
    generated_docs: tuple[tuple[str, tuple[str, ...]], ...] = ()

    def sort_key(self):
        return (self.axiom, self.query_id, self.doc_ids)


def _distinct(query_tokens) -> tuple[str, ...]:
    return tuple(dict.fromkeys(query_tokens))


def tfc1_eligible(query_tokens, d1_tokens, d2_tokens, params: AxiomParams) -> bool:
    """More query-term occurrences at comparable length: per-term counts of
    D1 dominate D2's with a strictly larger total."""
    if abs(len(d1_tokens) - len(d2_tokens)) > params.delta_len:
        return False
    c1 = Counter(d1_tokens)
    c2 = Counter(d2_tokens)
    terms = _distinct(query_tokens)
    if any(c1[q] < c2[q] for q in terms):
        return False
    return sum(c1[q] for q in terms) > sum(c2[q] for q in terms)


def tfc2_eligible(query_tokens, d1_tokens, d2_tokens, d3_tokens, params: AxiomParams) -> bool:
    """Diminishing returns: query-term counts climb D1 < D2 < D3 in equal
    per-term steps, at comparable lengths."""
    lengths = (len(d1_tokens), len(d2_tokens), len(d3_tokens))
    if max(lengths) - min(lengths) > params.delta_len:
        return False
    c1 = Counter(d1_tokens)
    c2 = Counter(d2_tokens)
    c3 = Counter(d3_tokens)
    terms = _distinct(query_tokens)
    s1 = sum(c1[q] for q in terms)
    s2 = sum(c2[q] for q in terms)
    s3 = sum(c3[q] for q in terms)
    if not (s3 > s2 > s1 > 0):
        return False
    return all(c2[q] - c1[q] == c3[q] - c2[q] for q in terms)


def mtdc_eligible(query_tokens, d1_tokens, d2_tokens, idf_fn, params: AxiomParams) -> bool:
    """Term discrimination: every differing query-term count pairs up into a
    swap where D1 holds more of the higher-IDF term."""
    if abs(len(d1_tokens) - len(d2_tokens)) > params.delta_len:
        return False
    c1 = Counter(d1_tokens)
    c2 = Counter(d2_tokens)
    qcount = Counter(query_tokens)
    terms = _distinct(query_tokens)
    gainers = [q for q in terms if c1[q] > c2[q]]
    losers = [q for q in terms if c1[q] < c2[q]]
    if not gainers or len(gainers) != len(losers):
        return False

    def swap_ok(gain: str, lose: str) -> bool:
        return (
            c1[gain] == c2[lose]
            and c1[lose] == c2[gain]
            and idf_fn(gain) >= idf_fn(lose)
            and qcount[gain] >= qcount[lose]
        )

    def match(gs, ls) -> bool:
        if not gs:
            return True
        g = gs[0]
        for i, l in enumerate(ls):
            if swap_ok(g, l) and match(gs[1:], ls[:i] + ls[i + 1:]):
                return True
        return False

    return match(gainers, losers)


def lnc1_eligible(query_tokens, d1_tokens, d2_tokens) -> bool:
    """Length penalty: equal query-term counts and some non-query term
    occurring exactly once more in D2."""
    c1 = Counter(d1_tokens)
    c2 = Counter(d2_tokens)
    qset = set(query_tokens)
    if any(c1[q] != c2[q] for q in qset):
        return False
    return any(t not in qset and c2[t] == c1[t] + 1 for t in c2)


def lnc2_generate(doc_tokens, params: AxiomParams):
    """Duplicate a document k = floor(max_tokens/|D|) times; None when it
    cannot be duplicated at least twice within the token cap."""
    n = len(doc_tokens)
    if n == 0:
        return None
    k = params.max_tokens // n
    if k < 2:
        return None
    return tuple(doc_tokens) * k, k


def _naive_gamma(query_tokens, doc_tokens):
    """Minimum position distance between occurrences of two distinct query
    terms, straight from the token sequence; None if under two are present."""
    positions: dict[str, list[int]] = {}
    qset = set(query_tokens)
    for pos, token in enumerate(doc_tokens):
        if token in qset:
            positions.setdefault(token, []).append(pos)
    if len(positions) < 2:
        return None
    terms = list(positions)
    best = None
    for i in range(len(terms)):
        for j in range(i + 1, len(terms)):
            for p in positions[terms[i]]:
                for q in positions[terms[j]]:
                    gap = abs(p - q)
                    if best is None or gap < best:
                        best = gap
    return best


def tp_eligible(query_tokens, d1_tokens, d2_tokens) -> bool:
    """Proximity: both documents have a defined minimum query-term pair
    distance and D1's is strictly smaller."""
    g1 = _naive_gamma(query_tokens, d1_tokens)
    if g1 is None:
        return False
    g2 = _naive_gamma(query_tokens, d2_tokens)
    if g2 is None:
        return False
    return g1 < g2


def _cover(query_tokens, doc_tokens) -> int:
    doc_set = set(doc_tokens)
    return sum(1 for q in set(query_tokens) if q in doc_set)


def _non_query_tokens(query_tokens, doc_tokens) -> tuple[str, ...]:
    qset = set(query_tokens)
    return tuple(t for t in doc_tokens if t not in qset)


def stmc1_eligible(query_tokens, d1_tokens, d2_tokens, table: EmbeddingTable, params: AxiomParams) -> bool:
    """Semantic matching: same query-term coverage, D1's non-query tokens
    closer to the query in mean-vector cosine."""
    if _cover(query_tokens, d1_tokens) != _cover(query_tokens, d2_tokens):
        return False
    s1 = sigma_prime(_non_query_tokens(query_tokens, d1_tokens), query_tokens, table)
    if s1 is None:
        return False
    s2 = sigma_prime(_non_query_tokens(query_tokens, d2_tokens), query_tokens, table)
    if s2 is None:
        return False
    return s1 > s2


def stmc2_eligible(query_tokens, d1_tokens, d2_tokens, table: EmbeddingTable, params: AxiomParams) -> bool:
    """Syntactic over semantic: D2 carries more non-query mass than D1 has
    query mass, and the two remainders are semantically close."""
    c1 = Counter(d1_tokens)
    c2 = Counter(d2_tokens)
    qset = set(query_tokens)
    query_mass_1 = sum(n for t, n in c1.items() if t in qset)
    non_query_mass_2 = sum(n for t, n in c2.items() if t not in qset)
    if not non_query_mass_2 > query_mass_1 > 0:
        return False
    sim = sigma_prime(
        _non_query_tokens(query_tokens, d1_tokens),
        _non_query_tokens(query_tokens, d2_tokens),
        table,
    )
    return sim is not None and sim > params.delta_sim


def stmc3_eligible(query_tokens, d1_tokens, d2_tokens, table: EmbeddingTable, params: AxiomParams) -> bool:
    """Different-term semantics: equal coverage and comparable length, D1
    with strictly more query mass, D2's remainder closer to the query."""
    if abs(len(d1_tokens) - len(d2_tokens)) > params.delta_len:
        return False
    if _cover(query_tokens, d1_tokens) != _cover(query_tokens, d2_tokens):
        return False
    c1 = Counter(d1_tokens)
    c2 = Counter(d2_tokens)
    terms = _distinct(query_tokens)
    if not sum(c1[q] for q in terms) > sum(c2[q] for q in terms):
        return False
    s1 = sigma_prime(_non_query_tokens(query_tokens, d1_tokens), query_tokens, table)
    if s1 is None:
        return False
    s2 = sigma_prime(_non_query_tokens(query_tokens, d2_tokens), query_tokens, table)
    if s2 is None:
        return False
    return s2 > s1


def check_fulfilment(instance: DiagnosticInstance, scores, params: AxiomParams) -> bool:
    """Does the score table order the instance as its heuristic dictates?

    scores: mapping (query_id, doc_id) -> float, covering generated ids too.
    """
    values = []
    for doc_id in instance.doc_ids:
        key = (instance.query_id, doc_id)
        try:
            values.append(scores[key])
        except KeyError:
            raise DataError(f"missing score for query {instance.query_id!r}, document {doc_id!r}") from None
    eps = params.epsilon
    if instance.axiom == TFC2:
        return (values[1] - values[0]) > (values[2] - values[1]) + eps
    if instance.axiom in STRICT_AXIOMS:
        return values[0] > values[1] + eps
    return values[0] >= values[1] - eps
