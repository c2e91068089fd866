"""Re-derive every index from the raw corpus and compare with what is stored."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .errors import PhrasedexError, UnsupportedQuery
from .index import Index
from .lexicon import FrequencyClass, tokenize
from .oracle import ScanOracle, brute_annotations, brute_occurrences, brute_pairs, brute_stop_phrases
from .planner import QueryPlanner

STOP = FrequencyClass.STOP
MAX_EXAMPLES = 5


@dataclass
class CheckResult:
    name: str
    passed: bool
    checked: int = 0
    counterexamples: list[str] = field(default_factory=list)
    error: str | None = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{status}  {self.name} ({self.checked} checked)"
        if self.error:
            text += f": {self.error}"
        return text


@dataclass
class VerifyReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_text(self) -> str:
        lines = []
        for c in self.checks:
            lines.append(c.line())
            lines += [f"      {e}" for e in c.counterexamples]
        lines.append("all checks passed" if self.passed else "verification FAILED")
        return "\n".join(lines)


class _Check:
    def __init__(self, name: str):
        self.result = CheckResult(name, True)

    def count(self, n: int = 1) -> None:
        self.result.checked += n

    def fail(self, message: str) -> None:
        self.result.passed = False
        if len(self.result.counterexamples) < MAX_EXAMPLES:
            self.result.counterexamples.append(message)


def _run(report: VerifyReport, name: str, fn: Callable[[_Check], None]) -> None:
    check = _Check(name)
    try:
        fn(check)
    except Exception as exc:  # a corrupt index may fail anywhere in decoding
        check.result.passed = False
        check.result.error = f"{type(exc).__name__}: {exc}"
    report.checks.append(check.result)


def _load_corpus(corpus) -> list[list[str]]:
    from .indexer import read_corpus

    docs, _ = read_corpus(corpus)
    return [tokenize(text) for _, text in docs]


def verify_index(index_dir, corpus, oracle_queries: int = 200, seed: int = 0) -> VerifyReport:
    """Run every invariant check of ``index_dir`` against ``corpus``.

    Failures are report content; decoding errors fail the check that hit them.
    """
    report = VerifyReport()
    try:
        index = Index(index_dir)
    except (PhrasedexError, OSError) as exc:
        report.checks.append(CheckResult("open", False, error=f"{type(exc).__name__}: {exc}"))
        return report
    with index:
        _verify(index, _load_corpus(corpus), report, oracle_queries, seed)
    return report


def _verify(index: Index, docs: list[list[str]], report: VerifyReport, oracle_queries: int, seed: int) -> None:
    lex, cfg = index.lexicon, index.config
    oracle = ScanOracle(docs, lex, cfg)
    forms_docs = oracle.forms

    def documents(c: _Check) -> None:
        if index.n_docs != len(docs) or len(index.documents) != len(docs):
            c.fail(f"index holds {index.n_docs} documents, corpus has {len(docs)}")
        for d, tokens in enumerate(docs[:index.n_docs]):
            c.count()
            if index.documents.tokens(d) != tokens:
                c.fail(f"doc {d}: stored tokens differ from the corpus")

    def lexicon(c: _Check) -> None:
        ranks = sorted(lex.stop_rank(f) for f in lex.stop_forms)
        if ranks != list(range(len(ranks))):
            c.fail("stop-list numbers are not dense")
        ranked = sorted(range(len(lex)), key=lex.frequency_rank)
        for f in ranked:
            c.count()
            cls = lex.classify(f)
            if cls is STOP and lex.stop_rank(f) is None:
                c.fail(f"stop form {lex.surface(f)!r} has no stop-list number")
        top = [f for f in ranked if lex.count(f) > 0][:len(lex.stop_forms)]
        if set(top) != set(lex.stop_forms):
            c.fail("stop list is not the most frequent forms")

    def stop_windows(c: _Check) -> None:
        want = brute_stop_phrases(forms_docs, lex, cfg.min_length, cfg.max_length)
        got = {}
        for key, postings in index.stop_phrases.entries():
            got[key] = {tuple(p) for p in postings}
        for key in sorted(set(want) | set(got)):
            c.count()
            w, g = want.get(key, set()), got.get(key, set())
            if w != g:
                c.fail(f"stop key {key}: missing {sorted(w - g)[:3]}, unexpected {sorted(g - w)[:3]}")

    occurrences = brute_occurrences(forms_docs, lex)

    def basic_streams(c: _Check) -> None:
        for f in range(len(lex)):
            if lex.classify(f) is STOP:
                continue
            c.count()
            want = occurrences.get(f, [])
            docs_, pos = index.basic.occurrence_arrays(f)
            got = list(zip(docs_.tolist(), pos.tolist()))
            if got != want:
                missing = sorted(set(want) - set(got))[:3]
                extra = sorted(set(got) - set(want))[:3]
                c.fail(f"form {lex.surface(f)!r}: missing {missing}, unexpected {extra}")
                continue
            first: dict[int, list] = {}
            for d, p in want:
                first.setdefault(d, [p, 0])[1] += 1
            fd, fp, fc = index.basic.first_occurrence_arrays(f)
            rec = {d: [p, n] for d, p, n in zip(fd.tolist(), fp.tolist(), fc.tolist())}
            if rec != first:
                c.fail(f"form {lex.surface(f)!r}: first-occurrence records disagree with the occurrences")

    def annotations(c: _Check) -> None:
        want = brute_annotations(forms_docs, lex, cfg)
        for f in range(len(lex)):
            if lex.classify(f) is STOP:
                continue
            for posting, ann in index.basic.occurrences_with_stops(f):
                c.count()
                expected = want.get((f, posting.doc, posting.pos))
                if tuple(ann.neighbors) != expected:
                    c.fail(f"form {lex.surface(f)!r} at {tuple(posting)}: stored {ann.neighbors}, expected {expected}")

    def expanded(c: _Check) -> None:
        want = brute_pairs(forms_docs, lex, cfg)
        got = {}
        for key, postings in index.expanded.entries():
            got[(key.w, key.v)] = {tuple(p) for p in postings}
        for key in sorted(set(want) | set(got)):
            c.count()
            w, g = want.get(key, set()), got.get(key, set())
            if w != g:
                c.fail(f"pair {tuple(lex.surface(f) for f in key)}: missing {sorted(w - g)[:3]}, "
                       f"unexpected {sorted(g - w)[:3]}")
        for (w, v), postings in got.items():
            if w == v or (v, w) not in got:
                continue
            mirrored = {(d, p + dist, -dist) for d, p, dist in got[(v, w)]}
            both = postings & mirrored
            if both:
                c.fail(f"pair {(lex.surface(w), lex.surface(v))} stored in both orientations: {sorted(both)[:3]}")

    def baseline(c: _Check) -> None:
        if index.baseline is None:
            return
        for f in range(len(lex)):
            c.count()
            want = oracle.where.get(f, [])
            d, p = index.baseline.posting_arrays(f)
            got = list(zip(d.tolist(), p.tolist()))
            if got != want:
                c.fail(f"baseline form {lex.surface(f)!r}: {len(got)} postings stored, {len(want)} expected")

    def conservation(c: _Check) -> None:
        from .indexer import CorpusManifest

        manifest = CorpusManifest.load(index.path)
        covered = {dp for occ in occurrences.values() for dp in occ}
        stored = set()
        for f in range(len(lex)):
            if lex.classify(f) is not STOP:
                d, p = index.basic.occurrence_arrays(f)
                stored.update(zip(d.tolist(), p.tolist()))
        total = sum(len(t) for t in docs)
        c.count(total)
        if stored != covered:
            c.fail(f"basic index covers {len(stored)} token positions, corpus has {len(covered)} non-stop tokens")
        if len(stored) + manifest.stop_only_tokens != total:
            c.fail(f"{len(stored)} basic positions + {manifest.stop_only_tokens} stop-only tokens != {total} tokens")
        if manifest.total_tokens != total:
            c.fail(f"manifest lists {manifest.total_tokens} tokens, corpus has {total}")

    def equivalence(c: _Check) -> None:
        from .bench import _baseline_mode, draw_queries

        planner = QueryPlanner(index)
        for doc, q in draw_queries(index, oracle_queries, seed):
            c.count()
            words = list(q.words)
            try:
                got = planner.search(words)
            except UnsupportedQuery:
                got = "unsupported"
            try:
                want = oracle.planned_search(words)
            except UnsupportedQuery:
                want = "unsupported"
            if got != want:
                c.fail(f"query {q.text!r}: planner and scan disagree")
            if index.baseline is not None:
                mode, dist = _baseline_mode(q)
                got_b = index.baseline.search([lex.analyze(w) for w in words], mode, dist)
                if got_b != oracle.scan_search(words, mode, dist):
                    c.fail(f"query {q.text!r}: baseline {mode} and scan disagree")

    for name, fn in [("documents", documents), ("lexicon", lexicon), ("stop_phrase_windows", stop_windows),
                     ("basic_streams", basic_streams), ("annotations", annotations),
                     ("expanded_pairs", expanded), ("baseline_lists", baseline),
                     ("token_conservation", conservation), ("oracle_equivalence", equivalence)]:
        _run(report, name, fn)
