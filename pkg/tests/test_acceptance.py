"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

import filecmp
import time
from collections import Counter

import numpy as np
import pytest

from helpers import build_small
from phrasedex import ReadStats, ingest
from phrasedex.bench import run_bench, draw_queries
from phrasedex.errors import UnsupportedQuery
from phrasedex.lexicon import FrequencyClass
from phrasedex.oracle import analyze_corpus, brute_pairs
from phrasedex.planner import QueryPlanner, QueryType
from phrasedex.stop_phrase_index import StopKeyCodec
from phrasedex.storage.huffman import HuffmanTable
from phrasedex.storage.varint import (decode_first_occurrences, decode_pair_postings, decode_postings,
                                      encode_first_occurrences, encode_pair_postings, encode_postings)
from phrasedex.synthetic import desk_config, stop_run_document

STOP = FrequencyClass.STOP


def verdict(number: int, title: str, ok: bool, detail: str = "") -> None:
    print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'}  {title}" + (f": {detail}" if detail else ""))
    assert ok, detail


@pytest.fixture(scope="module")
def bench_report(desk_index):
    return run_bench(desk_index, n_queries=1000, seed=0)


def test_1_window_count_identity(tmp_path):
    t0 = time.perf_counter()
    runs = list(range(1, 13))
    docs = [" ".join(stop_run_document([s])) for s in runs] + [" ".join(stop_run_document(runs))]
    index = build_small(tmp_path / "ix", docs)
    per_doc: dict[int, Counter] = {}
    for key, postings in index.stop_phrases.entries():
        for p in postings:
            per_doc.setdefault(p.doc, Counter())[len(key)] += 1
    index.close()
    bad = []
    for d, s in enumerate(runs):
        for length in range(2, 6):
            if per_doc.get(d, Counter())[length] != max(0, s - length + 1):
                bad.append((s, length))
    combined = per_doc[len(runs)]
    for length in range(2, 6):
        if combined[length] != sum(max(0, s - length + 1) for s in runs):
            bad.append(("all", length))
    ten = per_doc[9]
    elapsed = time.perf_counter() - t0
    verdict(1, "stop-run window counts", not bad and (ten[2], ten[3], ten[4]) == (9, 8, 7) and elapsed < 1,
            f"S=10 gives {ten[2]}/{ten[3]}/{ten[4]}/{ten[5]} phrases of length 2/3/4/5, "
            f"mismatches {bad}, {elapsed:.2f}s")


def test_2_oracle_equivalence(desk_corpus, desk_index, desk_oracle):
    t0 = time.perf_counter()
    planner = QueryPlanner(desk_index)
    strict = QueryPlanner(desk_index, fallback=False)
    queries = draw_queries(desk_index, 1000, seed=0)
    types, splits, fallbacks, mismatches = Counter(), 0, 0, []
    for doc, q in queries:
        words = list(q.words)
        for p, fb in ((planner, True), (strict, False)):
            try:
                got = p.search(words)
            except UnsupportedQuery:
                got = "unsupported"
            try:
                want = desk_oracle.planned_search(words, fallback=fb)
            except UnsupportedQuery:
                want = "unsupported"
            if got != want:
                mismatches.append((q.text, fb))
        typed = planner.split_query([desk_index.lexicon.analyze(w) for w in words])
        splits += len(typed) > 1
        for tq in typed:
            plan = planner.classify_query(tq, False)
            types[plan.qtype] += 1
            if plan.qtype is not QueryType.TYPE1 and not planner.execute(plan, tq):
                fallbacks += 1
    elapsed = time.perf_counter() - t0
    ok = (not mismatches and len(queries) >= 1000 and len(desk_corpus.documents) >= 500
          and all(types[t] for t in QueryType) and splits > 0 and fallbacks > 0 and elapsed < 300)
    mix = " ".join(f"{t.name}={types[t]}" for t in QueryType)
    verdict(2, "planner equals scan oracle", ok,
            f"{len(queries)} queries on {desk_corpus.n_tokens} tokens, {mix}, split={splits}, "
            f"fallback={fallbacks}, mismatches={len(mismatches)} {mismatches[:3]}, {elapsed:.1f}s")


def test_3_expanded_completeness(desk_corpus, desk_index):
    t0 = time.perf_counter()
    lex = desk_index.lexicon
    want = brute_pairs(analyze_corpus(desk_corpus.documents, lex), lex, desk_index.config)
    got = {}
    for key, postings in desk_index.expanded.entries():
        got[(key.w, key.v)] = {tuple(p) for p in postings}
    mirrored = 0
    for (w, v), postings in got.items():
        if w != v and (v, w) in got:
            mirrored += len(postings & {(d, p + dist, -dist) for d, p, dist in got[(v, w)]})
    missing = sum(len(ps - got.get(k, set())) for k, ps in want.items())
    extra = sum(len(ps - want.get(k, set())) for k, ps in got.items())
    elapsed = time.perf_counter() - t0
    total = sum(len(ps) for ps in want.values())
    verdict(3, "expanded index equals brute-force pairs", missing == extra == mirrored == 0 and elapsed < 60,
            f"{total} pair postings in {len(want)} keys, missing={missing}, unexpected={extra}, "
            f"mirrored={mirrored}, {elapsed:.1f}s")


def test_4_codec_round_trips():
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    failures = 0
    for _ in range(10_000):
        n = int(rng.integers(0, 60))
        docs = np.sort(rng.integers(0, 1 << int(rng.integers(1, 31)), size=n))
        pos = rng.integers(0, 1 << int(rng.integers(1, 20)), size=n)
        plist = sorted(set(zip(docs.tolist(), pos.tolist())))
        d, p = decode_postings(encode_postings(plist), len(plist))
        failures += list(zip(d.tolist(), p.tolist())) != plist
        steps = rng.integers(1, 7, size=len(plist)) * rng.choice([-1, 1], size=len(plist))
        pairs = [(a, b, int(s)) for (a, b), s in zip(plist, steps)]
        d, p, s = decode_pair_postings(encode_pair_postings(pairs), len(pairs))
        failures += list(zip(d.tolist(), p.tolist(), s.tolist())) != pairs
        firsts = [(a, b, int(rng.integers(1, 1000))) for a, b in dict(plist).items()]
        d, p, c = decode_first_occurrences(encode_first_occurrences(firsts), len(firsts))
        failures += list(zip(d.tolist(), p.tolist(), c.tolist())) != firsts
    weights = (1000.0 / np.arange(1, 701) ** 1.1).astype(np.int64) + 1
    huffman = StopKeyCodec(HuffmanTable.from_weights(weights.tolist()))
    varint = StopKeyCodec(None)
    for _ in range(10_000):
        seq = sorted(rng.integers(0, 700, size=int(rng.integers(0, 13))).tolist())
        for codec in (huffman, varint):
            failures += codec.decode(codec.encode(seq)) != tuple(seq)
    elapsed = time.perf_counter() - t0
    verdict(4, "codec round trips", failures == 0 and elapsed < 30,
            f"10000 posting lists x3 stream kinds, 10000 stop sequences x2 codecs, {failures} failures, "
            f"{elapsed:.1f}s")


def test_5_self_match(bench_report):
    # run_bench raises SelfMatchError on any miss, for either system
    missed = [r for r in bench_report.results if r.n_matches == 0]
    verdict(5, "every benchmark query finds its source document", bench_report.query_count == 1000 and not missed,
            f"{bench_report.query_count} queries on each system, {len(missed)} empty results")


def test_6_postings_reduction(bench_report):
    a, b = bench_report.aggregate("additional"), bench_report.aggregate("baseline")
    mean_r, max_r = bench_report.postings_ratio()
    verdict(6, "additional index reads fewer postings than the baseline", a.mean_postings < b.mean_postings,
            f"mean {a.mean_postings:.1f} vs {b.mean_postings:.1f} (ratio {mean_r:.4f}, target <= 0.2 "
            f"{'met' if mean_r <= 0.2 else 'missed'}), max {a.max_postings} vs {b.max_postings} "
            f"(ratio {max_r:.4f}, target <= 0.333 {'met' if max_r <= 1 / 3 else 'missed'})")


def test_7_first_occurrence_economy(desk_index, desk_oracle):
    t0 = time.perf_counter()
    planner = QueryPlanner(desk_index)
    lex = desk_index.lexicon
    checked, repeats, problems = 0, 0, []
    for _, q in draw_queries(desk_index, 1000, seed=7):
        for tq in planner.split_query([lex.analyze(w) for w in q.words]):
            forms = {f for k, fs in enumerate(tq.positions) if tq.classes[k] is not STOP for f in fs}
            if not forms:
                continue
            stats = ReadStats()
            planner.execute_fallback(tq, stats)
            records = sum(len(desk_oracle.doc_first.get(f, {})) for f in forms)
            full = sum(len(desk_oracle.where.get(f, ())) for f in forms)
            checked += 1
            if not (stats.postings_read == stats.by_kind["s1"] == records):
                problems.append((q.text, stats.postings_read, stats.by_kind["s1"], records))
            if full > records:
                repeats += 1
                if not stats.postings_read < full:
                    problems.append((q.text, stats.postings_read, full))
            elif stats.postings_read > full:
                problems.append((q.text, stats.postings_read, full))
    elapsed = time.perf_counter() - t0
    verdict(7, "fallback reads one first-occurrence record per document", checked > 0 and not problems
            and elapsed < 60, f"{checked} fallback queries, {repeats} with repeated words, "
            f"{len(problems)} violations {problems[:3]}, {elapsed:.1f}s")


def test_8_build_determinism(desk_corpus, tmp_path):
    t0 = time.perf_counter()
    dirs = []
    for i, stamp in enumerate(("2026-01-01T00:00:00", None)):
        out = tmp_path / f"build{i}"
        ingest(desk_corpus.texts(), out, desk_config(), lemma_table=desk_corpus.lemma_table, created=stamp)
        dirs.append(out)
    a_files = sorted(p.relative_to(dirs[0]) for p in dirs[0].rglob("*") if p.is_file())
    b_files = sorted(p.relative_to(dirs[1]) for p in dirs[1].rglob("*") if p.is_file())
    differing = []
    for rel in a_files:
        if rel.name == "manifest.tsv":
            strip = [[line for line in (d / rel).read_text().splitlines() if not line.startswith("# created")]
                     for d in dirs]
            if strip[0] != strip[1]:
                differing.append(str(rel))
        elif not filecmp.cmp(dirs[0] / rel, dirs[1] / rel, shallow=False):
            differing.append(str(rel))
    elapsed = time.perf_counter() - t0
    verdict(8, "builds are byte-identical apart from the timestamp",
            a_files == b_files and not differing and elapsed < 300,
            f"{len(a_files)} files compared, differing {differing}, {elapsed:.1f}s")
