"""Diagnostic dataset extraction from per-query candidate pools.

Two routes produce the same instance sets: `extract` works from per-document
precomputed statistics (counts vectors, cached remainder similarities, index
positions), while `brute_force_extract` re-derives everything per tuple
straight from the token sequences via the predicate functions. Their output
equality is the module's central correctness property.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from axiomdiag import axioms
from axiomdiag.axioms import AxiomParams, DiagnosticInstance
from axiomdiag.embeddings import cosine, mean_vector, sigma_prime
from axiomdiag.errors import DataError
from axiomdiag.index import min_query_pair_distance


@dataclass(frozen=True)
class CandidatePool:
    query_id: str
    doc_ids: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.doc_ids)) != len(self.doc_ids):
            raise DataError(f"pool for query {self.query_id!r} has duplicate documents")


def pools_from_run(run, max_depth: int | None = None) -> list[CandidatePool]:
    """Group run rows into per-query pools, preserving rank order."""
    grouped: dict[str, list[str]] = {}
    for row in run.rows:
        grouped.setdefault(row.query_id, []).append(row.doc_id)
    pools = []
    for query_id in sorted(grouped):
        doc_ids = grouped[query_id]
        if max_depth is not None:
            doc_ids = doc_ids[:max_depth]
        pools.append(CandidatePool(query_id, tuple(doc_ids)))
    return pools


class _PoolView:
    """Per-pool precomputed document statistics for the fast route."""

    def __init__(self, pool, query, corpus, table, params):
        self.pool = pool
        self.query = query
        self.qterms = query.distinct_terms()
        self.qset = set(self.qterms)
        self.qcount = Counter(query.tokens)
        self.doc_ids = list(pool.doc_ids)
        self.tokens = []
        self.counters = []
        self.lengths = []
        self.qvecs = []
        self.qmass = []
        self.covers = []
        for doc_id in self.doc_ids:
            doc = corpus.get(doc_id)
            if doc is None:
                raise DataError(f"pooled document {doc_id!r} missing from the corpus")
            counter = Counter(doc.tokens)
            qvec = tuple(counter[t] for t in self.qterms)
            self.tokens.append(doc.tokens)
            self.counters.append(counter)
            self.lengths.append(len(doc.tokens))
            self.qvecs.append(qvec)
            self.qmass.append(sum(qvec))
            self.covers.append(sum(1 for c in qvec if c))
        self.table = table
        self.params = params
        self._rem_tokens = None
        self._rem_sim_q = None
        self._rem_means = None

    def rem_tokens(self):
        if self._rem_tokens is None:
            self._rem_tokens = [
                tuple(t for t in toks if t not in self.qset) for toks in self.tokens
            ]
        return self._rem_tokens

    def rem_sim_to_query(self):
        """sigma' of each document's non-query remainder against the query."""
        if self._rem_sim_q is None:
            self._rem_sim_q = [
                sigma_prime(rem, self.query.tokens, self.table)
                for rem in self.rem_tokens()
            ]
        return self._rem_sim_q

    def rem_means(self):
        if self._rem_means is None:
            self._rem_means = [mean_vector(rem, self.table) for rem in self.rem_tokens()]
        return self._rem_means


def _pairs(n: int):
    for i in range(n):
        for j in range(n):
            if i != j:
                yield i, j


def _extract_tfc1(view: _PoolView):
    out = []
    delta = view.params.delta_len
    for i, j in _pairs(len(view.doc_ids)):
        if abs(view.lengths[i] - view.lengths[j]) > delta:
            continue
        if view.qmass[i] <= view.qmass[j]:
            continue
        if all(a >= b for a, b in zip(view.qvecs[i], view.qvecs[j])):
            out.append((view.doc_ids[i], view.doc_ids[j]))
    return out


def _extract_tfc2(view: _PoolView):
    out = []
    delta = view.params.delta_len
    by_qvec: dict[tuple[int, ...], list[int]] = {}
    for idx_, qvec in enumerate(view.qvecs):
        by_qvec.setdefault(qvec, []).append(idx_)
    for i, j in _pairs(len(view.doc_ids)):
        if not view.qmass[j] > view.qmass[i] > 0:
            continue
        if abs(view.lengths[i] - view.lengths[j]) > delta:
            continue
        target = tuple(2 * b - a for a, b in zip(view.qvecs[i], view.qvecs[j]))
        if any(c < 0 for c in target):
            continue
        for k in by_qvec.get(target, ()):
            if k == i or k == j:
                continue
            lengths = (view.lengths[i], view.lengths[j], view.lengths[k])
            if max(lengths) - min(lengths) > delta:
                continue
            out.append((view.doc_ids[i], view.doc_ids[j], view.doc_ids[k]))
    return out


def _extract_mtdc(view: _PoolView, idf_fn):
    out = []
    delta = view.params.delta_len
    qterms = view.qterms
    idf = {t: idf_fn(t) for t in qterms}
    qc = view.qcount
    for i, j in _pairs(len(view.doc_ids)):
        if abs(view.lengths[i] - view.lengths[j]) > delta:
            continue
        vi, vj = view.qvecs[i], view.qvecs[j]
        gainers = [t for t, a, b in zip(qterms, vi, vj) if a > b]
        losers = [t for t, a, b in zip(qterms, vi, vj) if a < b]
        if not gainers or len(gainers) != len(losers):
            continue
        ci, cj = view.counters[i], view.counters[j]

        def swap_ok(g, l):
            return (
                ci[g] == cj[l]
                and ci[l] == cj[g]
                and idf[g] >= idf[l]
                and qc[g] >= qc[l]
            )

        def match(gs, ls):
            if not gs:
                return True
            g = gs[0]
            for n, l in enumerate(ls):
                if swap_ok(g, l) and match(gs[1:], ls[:n] + ls[n + 1:]):
                    return True
            return False

        if match(gainers, losers):
            out.append((view.doc_ids[i], view.doc_ids[j]))
    return out


def _extract_lnc1(view: _PoolView):
    out = []
    for i, j in _pairs(len(view.doc_ids)):
        if view.qvecs[i] != view.qvecs[j]:
            continue
        ci, cj = view.counters[i], view.counters[j]
        if any(t not in view.qset and cj[t] == ci[t] + 1 for t in cj):
            out.append((view.doc_ids[i], view.doc_ids[j]))
    return out


def _extract_lnc2(view: _PoolView):
    out = []
    for idx_, doc_id in enumerate(view.doc_ids):
        generated = axioms.lnc2_generate(view.tokens[idx_], view.params)
        if generated is None:
            continue
        gen_tokens, k = generated
        gen_id = f"{doc_id}#dup{k}"
        out.append(((gen_id, doc_id), ((gen_id, gen_tokens),)))
    return out


def _extract_tp(view: _PoolView, idx):
    gammas = [min_query_pair_distance(view.query, doc_id, idx) for doc_id in view.doc_ids]
    out = []
    for i, j in _pairs(len(view.doc_ids)):
        gi, gj = gammas[i], gammas[j]
        if gi is not None and gj is not None and gi < gj:
            out.append((view.doc_ids[i], view.doc_ids[j]))
    return out


def _extract_stmc1(view: _PoolView):
    sims = view.rem_sim_to_query()
    out = []
    for i, j in _pairs(len(view.doc_ids)):
        if view.covers[i] != view.covers[j]:
            continue
        si, sj = sims[i], sims[j]
        if si is not None and sj is not None and si > sj:
            out.append((view.doc_ids[i], view.doc_ids[j]))
    return out


def _extract_stmc2(view: _PoolView):
    means = view.rem_means()
    nonqmass = [l - m for l, m in zip(view.lengths, view.qmass)]
    out = []
    threshold = view.params.delta_sim
    for i, j in _pairs(len(view.doc_ids)):
        if not nonqmass[j] > view.qmass[i] > 0:
            continue
        mi, mj = means[i], means[j]
        if mi is None or mj is None:
            continue
        sim = cosine(mi, mj)
        if sim is not None and sim > threshold:
            out.append((view.doc_ids[i], view.doc_ids[j]))
    return out


def _extract_stmc3(view: _PoolView):
    sims = view.rem_sim_to_query()
    out = []
    delta = view.params.delta_len
    for i, j in _pairs(len(view.doc_ids)):
        if abs(view.lengths[i] - view.lengths[j]) > delta:
            continue
        if view.covers[i] != view.covers[j]:
            continue
        if view.qmass[i] <= view.qmass[j]:
            continue
        si, sj = sims[i], sims[j]
        if si is not None and sj is not None and sj > si:
            out.append((view.doc_ids[i], view.doc_ids[j]))
    return out


def _extract_pool(axiom, pool, queries, corpus, idx, table, idf_fn, params):
    query = queries.get(pool.query_id)
    if query is None:
        raise DataError(f"pool references unknown query {pool.query_id!r}")
    if axiom in axioms.SEMANTIC_AXIOMS and table is None:
        raise DataError(f"axiom {axiom} requires an embedding table")
    view = _PoolView(pool, query, corpus, table, params)
    if axiom == axioms.TFC1:
        tuples = _extract_tfc1(view)
    elif axiom == axioms.TFC2:
        tuples = _extract_tfc2(view)
    elif axiom == axioms.MTDC:
        if idf_fn is None:
            raise DataError("axiom MTDC requires an idf function")
        tuples = _extract_mtdc(view, idf_fn)
    elif axiom == axioms.LNC1:
        tuples = _extract_lnc1(view)
    elif axiom == axioms.LNC2:
        instances = [
            DiagnosticInstance(axiom, pool.query_id, doc_ids, generated)
            for doc_ids, generated in _extract_lnc2(view)
        ]
        instances.sort(key=lambda inst: inst.doc_ids)
        return instances
    elif axiom == axioms.TP:
        tuples = _extract_tp(view, idx)
    elif axiom == axioms.STMC1:
        tuples = _extract_stmc1(view)
    elif axiom == axioms.STMC2:
        tuples = _extract_stmc2(view)
    elif axiom == axioms.STMC3:
        tuples = _extract_stmc3(view)
    else:
        raise DataError(f"unknown axiom {axiom!r}")
    instances = [DiagnosticInstance(axiom, pool.query_id, doc_ids) for doc_ids in tuples]
    instances.sort(key=lambda inst: inst.doc_ids)
    return instances


def extract(axiom, pools, queries, corpus, idx, table, idf_fn, params: AxiomParams, threads: int = 1):
    """Yield the axiom's diagnostic instances over all pools, sorted by
    (query_id, doc_ids)."""
    ordered = sorted(pools, key=lambda p: p.query_id)

    def work(pool):
        return _extract_pool(axiom, pool, queries, corpus, idx, table, idf_fn, params)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool_exec:
            for instances in pool_exec.map(work, ordered):
                yield from instances
    else:
        for pool in ordered:
            yield from work(pool)


def brute_force_extract(axiom, pools, queries, corpus, idx, table, idf_fn, params: AxiomParams):
    """Naive reference route: test every ordered pair (or triple) with the
    predicate functions directly on the token sequences."""
    for pool in sorted(pools, key=lambda p: p.query_id):
        query = queries.get(pool.query_id)
        if query is None:
            raise DataError(f"pool references unknown query {pool.query_id!r}")
        docs = []
        for doc_id in pool.doc_ids:
            doc = corpus.get(doc_id)
            if doc is None:
                raise DataError(f"pooled document {doc_id!r} missing from the corpus")
            docs.append(doc)
        instances = []
        q = query.tokens
        if axiom == axioms.LNC2:
            for doc in docs:
                generated = axioms.lnc2_generate(doc.tokens, params)
                if generated is None:
                    continue
                gen_tokens, k = generated
                gen_id = f"{doc.id}#dup{k}"
                instances.append(
                    DiagnosticInstance(axiom, pool.query_id, (gen_id, doc.id), ((gen_id, gen_tokens),))
                )
        elif axiom == axioms.TFC2:
            for d1 in docs:
                for d2 in docs:
                    if d2 is d1:
                        continue
                    for d3 in docs:
                        if d3 is d1 or d3 is d2:
                            continue
                        if axioms.tfc2_eligible(q, d1.tokens, d2.tokens, d3.tokens, params):
                            instances.append(
                                DiagnosticInstance(axiom, pool.query_id, (d1.id, d2.id, d3.id))
                            )
        else:
            for d1 in docs:
                for d2 in docs:
                    if d2 is d1:
                        continue
                    if axiom == axioms.TFC1:
                        ok = axioms.tfc1_eligible(q, d1.tokens, d2.tokens, params)
                    elif axiom == axioms.MTDC:
                        ok = axioms.mtdc_eligible(q, d1.tokens, d2.tokens, idf_fn, params)
                    elif axiom == axioms.LNC1:
                        ok = axioms.lnc1_eligible(q, d1.tokens, d2.tokens)
                    elif axiom == axioms.TP:
                        ok = axioms.tp_eligible(q, d1.tokens, d2.tokens)
                    elif axiom == axioms.STMC1:
                        ok = axioms.stmc1_eligible(q, d1.tokens, d2.tokens, table, params)
                    elif axiom == axioms.STMC2:
                        ok = axioms.stmc2_eligible(q, d1.tokens, d2.tokens, table, params)
                    elif axiom == axioms.STMC3:
                        ok = axioms.stmc3_eligible(q, d1.tokens, d2.tokens, table, params)
                    else:
                        raise DataError(f"unknown axiom {axiom!r}")
                    if ok:
                        instances.append(DiagnosticInstance(axiom, pool.query_id, (d1.id, d2.id)))
        instances.sort(key=lambda inst: inst.doc_ids)
        yield from instances


def write_dataset(instances, path) -> int:
    """Write instances as TSV lines `axiom  query_id  doc_ids...`; returns the
    number of lines written."""
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for inst in instances:
            fh.write("\t".join((inst.axiom, inst.query_id) + inst.doc_ids) + "\n")
            count += 1
    return count


def read_dataset(path) -> list[DiagnosticInstance]:
    """Read a dataset TSV; generated LNC2 documents are referenced by id only
    (their tokens live in the sidecar corpus)."""
    instances = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) not in (4, 5):
                raise DataError(f"{path}:{lineno}: expected 4 or 5 fields, got {len(parts)}")
            axiom, query_id = parts[0], parts[1]
            if axiom not in axioms.ALL_AXIOMS:
                raise DataError(f"{path}:{lineno}: unknown axiom {axiom!r}")
            if (len(parts) == 5) != (axiom == axioms.TFC2):
                raise DataError(f"{path}:{lineno}: wrong arity for axiom {axiom}")
            instances.append(DiagnosticInstance(axiom, query_id, tuple(parts[2:])))
    return instances


def write_generated_corpus(instances, path) -> int:
    """Write LNC2 generated documents as a sidecar corpus TSV.

    A document pooled for several queries generates the same duplicate each
    time; it is written once.
    """
    seen: dict[str, tuple[str, ...]] = {}
    with open(path, "w", encoding="utf-8") as fh:
        for inst in instances:
            for gen_id, tokens in inst.generated_docs:
                if gen_id in seen:
                    if seen[gen_id] != tokens:
                        raise DataError(f"conflicting generated documents for id {gen_id!r}")
                    continue
                seen[gen_id] = tokens
                fh.write(f"{gen_id}\t{' '.join(tokens)}\n")
    return len(seen)
