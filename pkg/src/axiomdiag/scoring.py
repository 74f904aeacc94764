"""Score tables: internal query-likelihood scoring, external scorer
processes, and TREC run file I/O."""

from __future__ import annotations

import json
import logging
import math
import subprocess
import threading
from dataclasses import dataclass, field

from axiomdiag.corpus import Query
from axiomdiag.errors import DataError, ProtocolError
from axiomdiag.index import CollectionStats, InvertedIndex, ql_score, ql_score_tokens

logger = logging.getLogger(__name__)


class ScoreTable:
    """Immutable-by-convention mapping (query_id, doc_id) -> finite score."""

    def __init__(self):
        self._entries: dict[tuple[str, str], float] = {}

    def set(self, query_id: str, doc_id: str, score: float) -> None:
        if not math.isfinite(score):
            raise DataError(f"non-finite score for ({query_id!r}, {doc_id!r})")
        key = (query_id, doc_id)
        if key in self._entries:
            raise DataError(f"duplicate score for ({query_id!r}, {doc_id!r})")
        self._entries[key] = score

    def __getitem__(self, key: tuple[str, str]) -> float:
        return self._entries[key]

    def __contains__(self, key) -> bool:
        return key in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def items(self):
        return self._entries.items()

    def transformed(self, fn) -> "ScoreTable":
        """A new table with fn applied to every score."""
        out = ScoreTable()
        for (qid, did), score in self._entries.items():
            out.set(qid, did, fn(score))
        return out


@dataclass(frozen=True)
class ScoreRequest:
    """A (query, document) pair to score; tokens are carried explicitly for
    documents that are not in the corpus (LNC2 duplicates)."""

    query_id: str
    doc_id: str
    tokens: tuple[str, ...] | None = None


def requests_for_instances(instances, corpus) -> list[ScoreRequest]:
    """The deduplicated score requests a diagnostic dataset needs."""
    seen: dict[tuple[str, str], ScoreRequest] = {}
    for inst in instances:
        generated = dict(inst.generated_docs)
        for doc_id in inst.doc_ids:
            key = (inst.query_id, doc_id)
            if key in seen:
                continue
            tokens = generated.get(doc_id)
            if tokens is None and doc_id not in corpus:
                raise DataError(f"instance references unknown document {doc_id!r}")
            seen[key] = ScoreRequest(inst.query_id, doc_id, tokens)
    return list(seen.values())


def score_with_ql(requests, queries: dict[str, Query], idx: InvertedIndex,
                  stats: CollectionStats, mu: float) -> ScoreTable:
    """Score every request with Dirichlet-smoothed query likelihood."""
    table = ScoreTable()
    for req in requests:
        query = queries.get(req.query_id)
        if query is None:
            raise DataError(f"unknown query id {req.query_id!r}")
        if req.tokens is not None:
            score = ql_score_tokens(query, req.tokens, stats, mu)
        else:
            score = ql_score(query, req.doc_id, idx, stats, mu)
        table.set(req.query_id, req.doc_id, score)
    return table


def score_external(requests, command, queries: dict[str, Query], corpus) -> ScoreTable:
    """Score requests through an external process speaking the line-delimited
    JSON protocol on its standard streams.

    Requests are pipelined from a writer thread; responses may arrive in any
    order and are matched by (qid, docid).
    """
    requests = list(requests)
    expected: set[tuple[str, str]] = set()
    lines = []
    for req in requests:
        query = queries.get(req.query_id)
        if query is None:
            raise DataError(f"unknown query id {req.query_id!r}")
        tokens = req.tokens
        if tokens is None:
            doc = corpus.get(req.doc_id)
            if doc is None:
                raise DataError(f"unknown document id {req.doc_id!r}")
            tokens = doc.tokens
        key = (req.query_id, req.doc_id)
        if key in expected:
            raise DataError(f"duplicate request for ({req.query_id!r}, {req.doc_id!r})")
        expected.add(key)
        lines.append(json.dumps({
            "qid": req.query_id,
            "query": " ".join(query.tokens),
            "docid": req.doc_id,
            "doc": " ".join(tokens),
        }, ensure_ascii=False))

    proc = subprocess.Popen(command, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                            text=True, encoding="utf-8")

    def feed():
        try:
            for line in lines:
                proc.stdin.write(line + "\n")
            proc.stdin.close()
        except BrokenPipeError:
            pass

    writer = threading.Thread(target=feed)
    writer.start()
    table = ScoreTable()
    try:
        for raw in proc.stdout:
            raw = raw.rstrip("\n")
            if not raw:
                continue
            try:
                payload = json.loads(raw)
                qid = payload["qid"]
                did = payload["docid"]
                score = float(payload["score"])
            except (ValueError, KeyError, TypeError):
                raise ProtocolError(f"malformed scorer response line: {raw!r}") from None
            if (qid, did) not in expected:
                raise ProtocolError(f"unrequested scorer response for ({qid!r}, {did!r})")
            if not math.isfinite(score):
                raise ProtocolError(f"non-finite score in response line: {raw!r}")
            if (qid, did) in table:
                raise ProtocolError(f"duplicate scorer response for ({qid!r}, {did!r})")
            table.set(qid, did, score)
    finally:
        writer.join()
        returncode = proc.wait()
    if returncode != 0:
        raise ProtocolError(f"external scorer exited with status {returncode}")
    missing = sorted(key for key in expected if key not in table)
    if missing:
        shown = ", ".join(f"({q}, {d})" for q, d in missing[:10])
        raise ProtocolError(f"{len(missing)} responses missing, first: {shown}")
    return table


@dataclass(frozen=True)
class RunRow:
    query_id: str
    doc_id: str
    rank: int
    score: float
    tag: str


@dataclass
class RunFile:
    rows: list[RunRow] = field(default_factory=list)


def write_run(rankings, path, tag: str = "axiomdiag") -> None:
    """Write per-query (doc_id, score) rankings in TREC run format. Scores are
    serialized with repr so they round-trip bit-exactly."""
    with open(path, "w", encoding="utf-8") as fh:
        for query_id in sorted(rankings):
            for rank, (doc_id, score) in enumerate(rankings[query_id], start=1):
                fh.write(f"{query_id} Q0 {doc_id} {rank} {score!r} {tag}\n")


def load_run(path) -> RunFile:
    """Parse a TREC run file, validating rank contiguity and score ordering
    per query (violations log warnings with row numbers)."""
    run = RunFile()
    last: dict[str, tuple[int, float]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 6:
                raise DataError(f"{path}:{lineno}: expected 6 run fields, got {len(parts)}")
            query_id, _, doc_id, rank_str, score_str, tag = parts
            try:
                rank = int(rank_str)
                score = float(score_str)
            except ValueError:
                raise DataError(f"{path}:{lineno}: bad rank or score") from None
            prev = last.get(query_id)
            if prev is None:
                if rank != 1:
                    logger.warning("%s:%d: query %s starts at rank %d", path, lineno, query_id, rank)
            else:
                if rank != prev[0] + 1:
                    logger.warning("%s:%d: rank gap for query %s (%d after %d)",
                                   path, lineno, query_id, rank, prev[0])
                if score > prev[1]:
                    logger.warning("%s:%d: score inversion for query %s at rank %d",
                                   path, lineno, query_id, rank)
            last[query_id] = (rank, score)
            run.rows.append(RunRow(query_id, doc_id, rank, score, tag))
    return run


def run_to_score_table(run: RunFile) -> ScoreTable:
    table = ScoreTable()
    for row in run.rows:
        table.set(row.query_id, row.doc_id, row.score)
    return table


def run_to_rankings(run: RunFile) -> dict[str, list[str]]:
    rankings: dict[str, list[str]] = {}
    for row in run.rows:
        rankings.setdefault(row.query_id, []).append(row.doc_id)
    return rankings


def write_score_table(table: ScoreTable, path) -> None:
    """Persist a score table as TSV `query_id  doc_id  score` in key order."""
    with open(path, "w", encoding="utf-8") as fh:
        for (query_id, doc_id), score in sorted(table.items()):
            fh.write(f"{query_id}\t{doc_id}\t{score!r}\n")


def load_score_table(path) -> ScoreTable:
    table = ScoreTable()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise DataError(f"{path}:{lineno}: expected 3 score fields")
            try:
                table.set(parts[0], parts[1], float(parts[2]))
            except ValueError:
                raise DataError(f"{path}:{lineno}: bad score {parts[2]!r}") from None
    return table
