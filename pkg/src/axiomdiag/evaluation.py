"""Effectiveness metrics, fulfilment fractions, relevance agreement, and the
term-overlap query split."""

from __future__ import annotations

import csv
import json
import math

from axiomdiag import axioms
from axiomdiag.axioms import AxiomParams, check_fulfilment


def _gain(grade: int, exponential: bool) -> float:
    return float(2 ** grade - 1) if exponential else float(grade)


def ndcg_at_k(ranking, qrels_for_query, k: int, exponential: bool = False) -> float:
    """Normalized DCG at cutoff k with log2(rank+1) discounts.

    Gain is the relevance grade (linear) or 2^grade - 1. Returns 0 when the
    query has no relevant document at all.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    grades = sorted((g for g in qrels_for_query.values() if g > 0), reverse=True)
    if not grades:
        return 0.0
    dcg = 0.0
    for i, doc_id in enumerate(ranking[:k], start=1):
        grade = qrels_for_query.get(doc_id, 0)
        if grade > 0:
            dcg += _gain(grade, exponential) / math.log2(i + 1)
    ideal = 0.0
    for i, grade in enumerate(grades[:k], start=1):
        ideal += _gain(grade, exponential) / math.log2(i + 1)
    return dcg / ideal


def mrr(ranking, qrels_for_query) -> float:
    """Reciprocal rank of the first relevant document; 0 if none retrieved."""
    for i, doc_id in enumerate(ranking, start=1):
        if qrels_for_query.get(doc_id, 0) > 0:
            return 1.0 / i
    return 0.0


def mean_effectiveness(rankings, qrels, ndcg_k: int, exponential: bool = False):
    """Mean nDCG@k and MRR over the queries present in the rankings."""
    if not rankings:
        return {"ndcg": None, "mrr": None, "queries": 0}
    ndcg_total = 0.0
    mrr_total = 0.0
    for query_id, ranking in rankings.items():
        per_query = qrels.get(query_id, {})
        ndcg_total += ndcg_at_k(ranking, per_query, ndcg_k, exponential)
        mrr_total += mrr(ranking, per_query)
    n = len(rankings)
    return {"ndcg": ndcg_total / n, "mrr": mrr_total / n, "queries": n}


def fulfilment_fraction(instances, scores, params: AxiomParams):
    """Fraction of instances the score table orders correctly; None for an
    empty dataset."""
    fulfilled = 0
    total = 0
    for inst in instances:
        total += 1
        if check_fulfilment(inst, scores, params):
            fulfilled += 1
    if total == 0:
        return None
    return fulfilled / total


def relevance_agreement(instances, qrels):
    """(instances containing exactly one relevant document, fraction of those
    where the relevant document is the axiom-preferred one).

    LNC2 instances are excluded: their preferred documents are generated and
    carry no judgments. For TFC2 the preferred slot is the highest-count
    document (the last one).
    """
    with_relevant = 0
    agreeing = 0
    for inst in instances:
        if inst.axiom == axioms.LNC2:
            continue
        per_query = qrels.get(inst.query_id, {})
        relevant = [d for d in inst.doc_ids if per_query.get(d, 0) > 0]
        if len(relevant) != 1:
            continue
        with_relevant += 1
        preferred = inst.doc_ids[-1] if inst.axiom == axioms.TFC2 else inst.doc_ids[0]
        if relevant[0] == preferred:
            agreeing += 1
    fraction = agreeing / with_relevant if with_relevant else None
    return with_relevant, fraction


def overlap_split_report(queries, qrels, rankings_by_model, corpus,
                         restrict_to_pool: bool = False, ndcg_k: int = 10,
                         exponential: bool = False):
    """Bucket queries by query-term overlap with their relevant document and
    report per-bucket mean nDCG for each model.

    The relevant document is the lexicographically smallest judged-relevant
    doc id with known text. Queries are sorted by overlap and cut into three
    contiguous buckets; earlier buckets absorb the remainder. With
    restrict_to_pool, each model averages only over the bucket queries whose
    relevant document appears in that model's ranking.
    """
    eligible = []
    excluded = 0
    for query_id in sorted(queries):
        query = queries[query_id]
        relevant = sorted(
            d for d, g in qrels.get(query_id, {}).items() if g > 0 and d in corpus
        )
        if not relevant:
            excluded += 1
            continue
        doc = corpus[relevant[0]]
        doc_terms = set(doc.tokens)
        qterms = set(query.tokens)
        overlap = sum(1 for t in qterms if t in doc_terms) / len(qterms)
        eligible.append((overlap, query_id, relevant[0]))
    eligible.sort(key=lambda item: (item[0], item[1]))

    n = len(eligible)
    base, rem = divmod(n, 3)
    sizes = [base + (1 if i < rem else 0) for i in range(3)]
    buckets = []
    start = 0
    for size in sizes:
        chunk = eligible[start:start + size]
        start += size
        entry = {
            "queries": [qid for _, qid, _ in chunk],
            "overlap_min": chunk[0][0] if chunk else None,
            "overlap_max": chunk[-1][0] if chunk else None,
            "models": {},
        }
        for model, rankings in rankings_by_model.items():
            values = []
            for overlap, qid, rel_doc in chunk:
                ranking = rankings.get(qid, [])
                if restrict_to_pool and rel_doc not in ranking:
                    continue
                values.append(ndcg_at_k(ranking, qrels.get(qid, {}), ndcg_k, exponential))
            entry["models"][model] = {
                "mean_ndcg": sum(values) / len(values) if values else None,
                "queries": len(values),
            }
        buckets.append(entry)
    return {"buckets": buckets, "excluded_queries": excluded}


def build_report(datasets, score_tables, qrels, params: AxiomParams,
                 effectiveness=None):
    """Assemble the diagnostic report: per axiom, dataset size, relevance
    agreement, and per-model fulfilment fraction.

    datasets: axiom -> list of DiagnosticInstance
    score_tables: model name -> score mapping
    """
    report = {"axioms": {}, "effectiveness": effectiveness or {}}
    for axiom in axioms.ALL_AXIOMS:
        instances = datasets.get(axiom)
        if instances is None:
            continue
        with_relevant, agreement = relevance_agreement(instances, qrels)
        entry = {
            "size": len(instances),
            "instances_with_relevant": with_relevant,
            "agreement": agreement,
            "fulfilment": {},
        }
        for model, scores in score_tables.items():
            entry["fulfilment"][model] = fulfilment_fraction(instances, scores, params)
        report["axioms"][axiom] = entry
    return report


def write_report_json(report, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_report_csv(report, path) -> None:
    """One row per axiom x model: size, relevance stats, fulfilment."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([
            "axiom", "model", "size", "instances_with_relevant",
            "agreement", "fulfilment",
        ])
        for axiom in axioms.ALL_AXIOMS:
            entry = report["axioms"].get(axiom)
            if entry is None:
                continue
            models = entry["fulfilment"] or {"-": None}
            for model in sorted(models):
                writer.writerow([
                    axiom,
                    model,
                    entry["size"],
                    entry["instances_with_relevant"],
                    "" if entry["agreement"] is None else repr(entry["agreement"]),
                    "" if models[model] is None else repr(models[model]),
                ])
