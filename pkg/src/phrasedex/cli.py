"""Command line: build, search, bench, stats, verify."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import IngestConfig
from .errors import ConfigError, ParseError, PhrasedexError, SelfMatchError, UnsupportedQuery

EXIT_USAGE = 2


def _open(path):
    from .index import Index

    try:
        return Index(path)
    except FileNotFoundError as exc:
        raise _UsageError(str(exc)) from exc


class _UsageError(Exception):
    pass


def cmd_build(args) -> int:
    from .indexer import ingest

    config = IngestConfig.from_file(args.config) if args.config else IngestConfig()
    if not Path(args.corpus).exists():
        raise _UsageError(f"corpus {args.corpus} does not exist")
    ingest(args.corpus, args.out, config, lemma_table=args.lemmas)
    print(f"built {args.out}")
    return 0


def cmd_search(args) -> int:
    from .planner import QueryPlanner
    from .storage.streams import ReadStats

    with _open(args.index) as index:
        planner = QueryPlanner(index, fallback=not args.no_fallback, exact_order=args.exact_order)
        stats = ReadStats()
        try:
            found = planner.search(args.query, stats, max_results=args.max_results)
        except UnsupportedQuery as exc:
            print(f"unsupported query: {exc}", file=sys.stderr)
            return EXIT_USAGE
        for m in found:
            span = "-" if m.span is None else str(m.span)
            pos = ",".join("-" if p is None else str(p) for p in m.positions)
            print(f"{m.doc}\t{span}\t{pos}")
        kinds = " ".join(f"{k}={v}" for k, v in sorted(stats.by_kind.items()))
        print(f"# matches={len(found)} postings_read={stats.postings_read} keys_probed={stats.keys_probed}"
              f" bytes_read={stats.bytes_read} {kinds}".rstrip())
    return 0


def cmd_bench(args) -> int:
    from .bench import run_bench

    with _open(args.index) as index:
        try:
            report = run_bench(index, args.queries, args.seed, args.starts_per_doc)
        except SelfMatchError as exc:
            print(f"self-match failure: {exc}", file=sys.stderr)
            return 1
        except ValueError as exc:
            raise _UsageError(str(exc)) from exc
    print(report.to_table())
    if args.report:
        Path(args.report).write_text(report.to_tsv(), encoding="utf-8")
    return 0


def cmd_stats(args) -> int:
    with _open(args.index) as index:
        sizes = index.component_sizes()
        print(f"documents\t{index.n_docs}")
        print(f"forms\t{len(index.lexicon)}\tstop={index.lexicon.stop_size}\tfrequent={index.lexicon.frequent_size}")
        print("component\tkeys\tkey_bytes\tstream_bytes\trecords")
        for name in ("stop_phrase", "expanded", "basic", "baseline"):
            s = sizes[name]
            print(f"{name}\t{s.get('keys', 0)}\t{s.get('key_bytes', 0)}\t{s.get('stream_bytes', 0)}"
                  f"\t{s.get('records', 0)}")
        print(f"total\tfile_bytes={sizes['total']['file_bytes']}\tsegments={sizes['total']['segments']}")
    return 0


def cmd_verify(args) -> int:
    from .verify import verify_index

    if not Path(args.corpus).exists():
        raise _UsageError(f"corpus {args.corpus} does not exist")
    report = verify_index(args.index, args.corpus, args.queries)
    print(report.to_text())
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phrasedex", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="index a corpus")
    p.add_argument("--corpus", required=True, help="directory of text files or a one-document-per-line file")
    p.add_argument("--out", required=True, help="empty output directory")
    p.add_argument("--config", help="key=value build configuration")
    p.add_argument("--lemmas", help="tab-separated surface -> basic forms table")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("search", help="run one query")
    p.add_argument("--index", required=True)
    p.add_argument("--query", required=True)
    p.add_argument("--no-fallback", action="store_true")
    p.add_argument("--exact-order", action="store_true")
    p.add_argument("--max-results", type=int)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("bench", help="postings-read and latency benchmark against the baseline")
    p.add_argument("--index", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--queries", type=int, default=1000)
    p.add_argument("--starts-per-doc", type=int, default=4)
    p.add_argument("--report", help="write the tab-separated report here")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("stats", help="index component sizes")
    p.add_argument("--index", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("verify", help="check a built index against its corpus")
    p.add_argument("--index", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--queries", type=int, default=200, help="sampled oracle-equivalence queries")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, ParseError, FileExistsError) as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PhrasedexError as exc:
        print(f"{parser.prog}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
