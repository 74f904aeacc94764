"""Command-line pipeline: index, retrieve, extract, score, diagnose, report.

Exit codes: 0 ok, 1 usage error, 2 data error, 3 external-scorer protocol
error. Errors print one machine-parsable line on stderr.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys

from axiomdiag import axioms, corpus as corpus_mod, evaluation, extraction, scoring
from axiomdiag.axioms import AxiomParams
from axiomdiag.embeddings import load_vectors
from axiomdiag.errors import DataError, ProtocolError
from axiomdiag.index import build_index, retrieve_topk


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _tokenizer_config(args) -> corpus_mod.TokenizerConfig:
    return corpus_mod.TokenizerConfig(
        lowercase=not args.no_lowercase,
        strip_punctuation=not args.keep_punctuation,
        max_doc_tokens=args.max_tokens,
    )


def _add_tokenizer_flags(parser):
    parser.add_argument("--max-tokens", type=int, default=512,
                        help="document token cap at ingestion (default 512)")
    parser.add_argument("--no-lowercase", action="store_true")
    parser.add_argument("--keep-punctuation", action="store_true")


def _add_axiom_flags(parser):
    parser.add_argument("--delta-len", type=int, default=10,
                        help="maximum document length gap (default 10)")
    parser.add_argument("--delta-sim", type=float, default=0.2,
                        help="STMC2 similarity threshold (default 0.2)")
    parser.add_argument("--epsilon", type=float, default=1e-9,
                        help="score tie tolerance (default 1e-9)")


def _axiom_params(args) -> AxiomParams:
    return AxiomParams(delta_len=args.delta_len, delta_sim=args.delta_sim,
                       max_tokens=args.max_tokens, epsilon=args.epsilon)


def _load_corpus_and_index(args, cfg):
    docs = corpus_mod.load_corpus(args.corpus, cfg)
    idx, stats = build_index(docs.values())
    return docs, idx, stats


def _parse_named(values, flag):
    out = {}
    for value in values:
        name, sep, path = value.partition("=")
        if not sep or not name or not path:
            raise UsageError(f"{flag} expects NAME=PATH, got {value!r}")
        if name in out:
            raise UsageError(f"duplicate {flag} name {name!r}")
        out[name] = path
    return out


def _cmd_index(args):
    cfg = _tokenizer_config(args)
    docs, idx, stats = _load_corpus_and_index(args, cfg)
    summary = {
        "num_docs": stats.num_docs,
        "total_tokens": stats.total_tokens,
        "vocabulary": len(stats.collection_tf),
        "empty_docs": sum(1 for n in idx.doc_lengths.values() if n == 0),
    }
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def _cmd_retrieve(args):
    cfg = _tokenizer_config(args)
    docs, idx, stats = _load_corpus_and_index(args, cfg)
    queries = corpus_mod.load_queries(args.queries, cfg)
    rankings = {}
    for query_id in sorted(queries):
        ranked = retrieve_topk(queries[query_id], args.k, idx, stats, args.mu)
        if ranked:
            rankings[query_id] = ranked
    scoring.write_run(rankings, args.out, tag=args.tag)
    return 0


def _extract_axioms(args, axiom_list):
    cfg = _tokenizer_config(args)
    docs, idx, stats = _load_corpus_and_index(args, cfg)
    queries = corpus_mod.load_queries(args.queries, cfg)
    run = scoring.load_run(args.run)
    pools = extraction.pools_from_run(run, max_depth=args.pool_depth)
    params = _axiom_params(args)
    table = load_vectors(args.vectors) if args.vectors else None

    def idf_fn(term):
        return corpus_mod.idf(stats.num_docs, stats.doc_freq.get(term, 0))

    all_instances = []
    for axiom in axiom_list:
        all_instances.extend(
            extraction.extract(axiom, pools, queries, docs, idx, table, idf_fn,
                               params, threads=args.threads)
        )
    all_instances.sort(key=lambda inst: inst.sort_key())
    extraction.write_dataset(all_instances, args.out)
    if args.generated_out:
        extraction.write_generated_corpus(all_instances, args.generated_out)
    elif any(inst.generated_docs for inst in all_instances):
        raise DataError("LNC2 instances were generated but --generated-out is not set")
    return 0


def _cmd_extract(args):
    if args.axiom == "all":
        axiom_list = list(axioms.ALL_AXIOMS)
    else:
        axiom_list = [args.axiom]
    if any(a in axioms.SEMANTIC_AXIOMS for a in axiom_list) and not args.vectors:
        raise DataError("semantic axioms require --vectors")
    return _extract_axioms(args, axiom_list)


def _cmd_gen_lnc2(args):
    return _extract_axioms(args, [axioms.LNC2])


def _collect_requests(args, cfg, docs):
    instances = []
    for path in args.dataset:
        instances.extend(extraction.read_dataset(path))
    merged = dict(docs)
    for path in args.generated_corpus or []:
        merged.update(corpus_mod.load_corpus(path, cfg))
    return scoring.requests_for_instances(instances, merged), merged


def _cmd_score_ql(args):
    cfg = _tokenizer_config(args)
    docs, idx, stats = _load_corpus_and_index(args, cfg)
    queries = corpus_mod.load_queries(args.queries, cfg)
    requests, merged = _collect_requests(args, cfg, docs)
    requests = [
        req if req.doc_id in idx.doc_lengths else
        scoring.ScoreRequest(req.query_id, req.doc_id, merged[req.doc_id].tokens)
        for req in requests
    ]
    table = scoring.score_with_ql(requests, queries, idx, stats, args.mu)
    scoring.write_score_table(table, args.out)
    return 0


def _cmd_score_ext(args):
    cfg = _tokenizer_config(args)
    docs = corpus_mod.load_corpus(args.corpus, cfg)
    queries = corpus_mod.load_queries(args.queries, cfg)
    requests, merged = _collect_requests(args, cfg, docs)
    command = shlex.split(args.scorer)
    if not command:
        raise UsageError("--scorer must name a command")
    table = scoring.score_external(requests, command, queries, merged)
    scoring.write_score_table(table, args.out)
    return 0


def _cmd_diagnose(args):
    if not args.scores:
        raise DataError("no score table")
    score_tables = {
        name: scoring.load_score_table(path)
        for name, path in _parse_named(args.scores, "--scores").items()
    }
    datasets: dict[str, list] = {}
    for path in args.dataset:
        for inst in extraction.read_dataset(path):
            datasets.setdefault(inst.axiom, []).append(inst)
    qrels = corpus_mod.load_qrels(args.qrels) if args.qrels else {}
    params = _axiom_params(args)
    report = evaluation.build_report(datasets, score_tables, qrels, params)
    if args.out_json:
        evaluation.write_report_json(report, args.out_json)
    if args.out_csv:
        evaluation.write_report_csv(report, args.out_csv)
    if not args.out_json and not args.out_csv:
        json.dump(report, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    return 0


def _cmd_eval(args):
    run = scoring.load_run(args.run)
    rankings = scoring.run_to_rankings(run)
    qrels = corpus_mod.load_qrels(args.qrels)
    result = evaluation.mean_effectiveness(rankings, qrels, args.ndcg_k,
                                           exponential=args.exponential_gain)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(result, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def _cmd_overlap_report(args):
    cfg = _tokenizer_config(args)
    docs = corpus_mod.load_corpus(args.corpus, cfg)
    queries = corpus_mod.load_queries(args.queries, cfg)
    qrels = corpus_mod.load_qrels(args.qrels)
    rankings_by_model = {}
    for name, path in _parse_named(args.run, "--run").items():
        rankings_by_model[name] = scoring.run_to_rankings(scoring.load_run(path))
    report = evaluation.overlap_split_report(
        queries, qrels, rankings_by_model, docs,
        restrict_to_pool=args.restrict_to_pool, ndcg_k=args.ndcg_k,
        exponential=args.exponential_gain,
    )
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="axiomdiag",
                     description="Axiom-based diagnostics for ad-hoc rankers")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", help="build and summarize the inverted index")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    _add_tokenizer_flags(p)
    p.set_defaults(fn=_cmd_index)

    p = sub.add_parser("retrieve", help="query-likelihood top-k retrieval")
    p.add_argument("--corpus", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--mu", type=float, default=2500.0)
    p.add_argument("--k", type=int, default=100)
    p.add_argument("--tag", default="ql")
    p.add_argument("--out", required=True)
    _add_tokenizer_flags(p)
    p.set_defaults(fn=_cmd_retrieve)

    for name, fn in (("extract", _cmd_extract), ("gen-lnc2", _cmd_gen_lnc2)):
        p = sub.add_parser(name, help="mine diagnostic instances from pools")
        p.add_argument("--corpus", required=True)
        p.add_argument("--queries", required=True)
        p.add_argument("--run", required=True)
        if name == "extract":
            p.add_argument("--axiom", default="all",
                           choices=list(axioms.ALL_AXIOMS) + ["all"])
        p.add_argument("--vectors")
        p.add_argument("--pool-depth", type=int, default=None)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--out", required=True)
        p.add_argument("--generated-out")
        _add_tokenizer_flags(p)
        _add_axiom_flags(p)
        p.set_defaults(fn=fn)

    p = sub.add_parser("score-ql", help="score dataset requests with internal QL")
    p.add_argument("--corpus", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--dataset", action="append", required=True)
    p.add_argument("--generated-corpus", action="append")
    p.add_argument("--mu", type=float, default=2500.0)
    p.add_argument("--out", required=True)
    _add_tokenizer_flags(p)
    p.set_defaults(fn=_cmd_score_ql)

    p = sub.add_parser("score-ext", help="score dataset requests with an external scorer")
    p.add_argument("--corpus", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--dataset", action="append", required=True)
    p.add_argument("--generated-corpus", action="append")
    p.add_argument("--scorer", required=True,
                   help="external scorer command line (line-delimited JSON protocol)")
    p.add_argument("--out", required=True)
    _add_tokenizer_flags(p)
    p.set_defaults(fn=_cmd_score_ext)

    p = sub.add_parser("diagnose", help="fulfilment and agreement report")
    p.add_argument("--dataset", action="append", required=True)
    p.add_argument("--scores", action="append", default=[],
                   help="NAME=PATH score table, repeatable")
    p.add_argument("--qrels")
    p.add_argument("--out-json")
    p.add_argument("--out-csv")
    p.add_argument("--max-tokens", type=int, default=512)
    _add_axiom_flags(p)
    p.set_defaults(fn=_cmd_diagnose)

    p = sub.add_parser("eval", help="nDCG/MRR for a run file")
    p.add_argument("--run", required=True)
    p.add_argument("--qrels", required=True)
    p.add_argument("--ndcg-k", type=int, default=10)
    p.add_argument("--exponential-gain", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("overlap-report", help="term-overlap query-split nDCG table")
    p.add_argument("--corpus", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--qrels", required=True)
    p.add_argument("--run", action="append", required=True,
                   help="NAME=PATH run file, repeatable")
    p.add_argument("--restrict-to-pool", action="store_true")
    p.add_argument("--ndcg-k", type=int, default=10)
    p.add_argument("--exponential-gain", action="store_true")
    p.add_argument("--out", required=True)
    _add_tokenizer_flags(p)
    p.set_defaults(fn=_cmd_overlap_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except UsageError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"error: data: {exc}", file=sys.stderr)
        return 2
    except ProtocolError as exc:
        print(f"error: protocol: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: data: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
