"""Benchmark harness: queries drawn from indexed documents, run on both systems."""

from __future__ import annotations

import random
import statistics
import time
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

from .errors import SelfMatchError
from .lexicon import FrequencyClass
from .planner import QueryPlanner
from .storage.streams import ReadStats

CONTIGUOUS = "contiguous"
SKIP_ONE = "skip-one"
SYSTEMS = ("additional", "baseline")


class SelectedQuery(NamedTuple):
    words: tuple[str, ...]
    mode: str
    start: int

    @property
    def length(self) -> int:
        return len(self.words)

    @property
    def text(self) -> str:
        return " ".join(self.words)

    @property
    def offsets(self) -> tuple[int, ...]:
        step = 1 if self.mode == CONTIGUOUS else 2
        return tuple(self.start + step * k for k in range(len(self.words)))


def select_queries(tokens: Sequence[str], lengths: Sequence[int] = (3, 4, 5),
                   is_stop: Callable[[str], bool] | None = None) -> list[SelectedQuery]:
    """Every contiguous and every skip-one query of each length, start by start.

    Queries with a stop word are only taken contiguously.  A length is
    skipped for starts whose window would run past the end of the document.
    """
    out: list[SelectedQuery] = []
    n_tok = len(tokens)
    for i in range(n_tok):
        for n in lengths:
            if i + n <= n_tok:
                out.append(SelectedQuery(tuple(tokens[i:i + n]), CONTIGUOUS, i))
            if i + 2 * (n - 1) < n_tok:
                words = tuple(tokens[i:i + 2 * n - 1:2])
                if is_stop is None or not any(is_stop(w) for w in words):
                    out.append(SelectedQuery(words, SKIP_ONE, i))
    return out


@dataclass
class QueryResult:
    doc: int
    query: SelectedQuery
    system: str
    postings_read: int
    latency: float
    n_matches: int


@dataclass
class Aggregate:
    count: int = 0
    mean_postings: float = 0.0
    max_postings: int = 0
    mean_latency: float = 0.0
    max_latency: float = 0.0

    @classmethod
    def of(cls, rows: Sequence[QueryResult]) -> "Aggregate":
        if not rows:
            return cls()
        postings = [r.postings_read for r in rows]
        lat = [r.latency for r in rows]
        return cls(len(rows), statistics.fmean(postings), max(postings), statistics.fmean(lat), max(lat))


@dataclass
class BenchReport:
    seed: int
    results: list[QueryResult] = field(default_factory=list)

    def rows(self, system: str, length: int | None = None, mode: str | None = None) -> list[QueryResult]:
        return [r for r in self.results if r.system == system
                and (length is None or r.query.length == length) and (mode is None or r.query.mode == mode)]

    def aggregate(self, system: str, length: int | None = None, mode: str | None = None) -> Aggregate:
        return Aggregate.of(self.rows(system, length, mode))

    @property
    def query_count(self) -> int:
        return len(self.rows(SYSTEMS[0]))

    def breakdown(self) -> list[tuple[int, str]]:
        return sorted({(r.query.length, r.query.mode) for r in self.results})

    def postings_ratio(self) -> tuple[float, float]:
        """``(mean ratio, max ratio)`` of additional-index postings over baseline."""
        a, b = self.aggregate("additional"), self.aggregate("baseline")
        return (a.mean_postings / b.mean_postings if b.mean_postings else float("nan"),
                a.max_postings / b.max_postings if b.max_postings else float("nan"))

    def to_tsv(self, latency: bool = True) -> str:
        head = ["system", "length", "mode", "queries", "mean_postings", "max_postings"]
        if latency:
            head += ["mean_latency_s", "max_latency_s"]
        lines = ["\t".join(head)]
        groups = [(None, None)] + self.breakdown()
        for system in SYSTEMS:
            for length, mode in groups:
                a = self.aggregate(system, length, mode)
                row = [system, str(length or "all"), mode or "all", str(a.count),
                       f"{a.mean_postings:.3f}", str(a.max_postings)]
                if latency:
                    row += [f"{a.mean_latency:.6f}", f"{a.max_latency:.6f}"]
                lines.append("\t".join(row))
        return "\n".join(lines) + "\n"

    def to_table(self) -> str:
        lines = [f"{'system':<11} {'len':>3} {'mode':<10} {'queries':>7} {'mean post':>11} {'max post':>9}"
                 f" {'mean ms':>8} {'max ms':>8}"]
        for system in SYSTEMS:
            for length, mode in [(None, None)] + self.breakdown():
                a = self.aggregate(system, length, mode)
                lines.append(f"{system:<11} {str(length or 'all'):>3} {mode or 'all':<10} {a.count:>7}"
                             f" {a.mean_postings:>11.1f} {a.max_postings:>9} {a.mean_latency * 1e3:>8.2f}"
                             f" {a.max_latency * 1e3:>8.2f}")
        mean_r, max_r = self.postings_ratio()
        lines.append(f"postings ratio additional/baseline: mean {mean_r:.4f}, max {max_r:.4f}")
        return "\n".join(lines)


def draw_queries(index, n_queries: int = 1000, seed: int = 0, starts_per_doc: int = 4,
                 lengths: Sequence[int] = (3, 4, 5)) -> list[tuple[int, SelectedQuery]]:
    """Seeded sample: random documents, a random run of start offsets in each."""
    lex = index.lexicon
    rng = random.Random(seed)

    def is_stop(word: str) -> bool:
        return any(lex.classify(f) is FrequencyClass.STOP for f in lex.analyze(word))

    eligible = [d for d in range(index.n_docs) if len(index.documents.tokens(d)) >= min(lengths)]
    out: list[tuple[int, SelectedQuery]] = []
    while eligible and len(out) < n_queries:
        doc = rng.choice(eligible)
        tokens = index.documents.tokens(doc)
        first = rng.randrange(len(tokens))
        for q in select_queries(tokens[first:first + starts_per_doc + 2 * max(lengths)], lengths, is_stop):
            if q.start >= starts_per_doc:
                break
            out.append((doc, SelectedQuery(q.words, q.mode, q.start + first)))
            if len(out) == n_queries:
                break
    return out


def _baseline_mode(q: SelectedQuery) -> tuple[str, int]:
    if q.mode == CONTIGUOUS:
        return "exact-phrase", 0
    return "proximity", 2 * (q.length - 1) + 1


def run_bench(index, n_queries: int = 1000, seed: int = 0, starts_per_doc: int = 4,
              planner: QueryPlanner | None = None) -> BenchReport:
    """Run every drawn query on both systems, sequentially in this thread.

    Raises :class:`SelfMatchError` when a query misses its source document.
    """
    if index.baseline is None:
        raise ValueError("index was built without the baseline; rebuild with build_baseline=true")
    planner = planner or QueryPlanner(index)
    report = BenchReport(seed)
    lex = index.lexicon
    for doc, q in draw_queries(index, n_queries, seed, starts_per_doc):
        stats = ReadStats()
        t0 = time.perf_counter()
        found = planner.search(list(q.words), stats)
        t1 = time.perf_counter()
        report.results.append(QueryResult(doc, q, "additional", stats.postings_read, t1 - t0, len(found)))
        if all(m.doc != doc for m in found):
            raise SelfMatchError(f"additional-index search for {q.text!r} ({q.mode}) missed document {doc}")
        mode, dist = _baseline_mode(q)
        stats = ReadStats()
        t0 = time.perf_counter()
        base = index.baseline.search([lex.analyze(w) for w in q.words], mode, dist, stats)
        t1 = time.perf_counter()
        report.results.append(QueryResult(doc, q, "baseline", stats.postings_read, t1 - t0, len(base)))
        if all(m.doc != doc for m in base):
            raise SelfMatchError(f"baseline search for {q.text!r} ({q.mode}) missed document {doc}")
    return report
