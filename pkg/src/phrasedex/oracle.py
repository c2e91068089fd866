"""Brute-force scanner over raw token sequences.

Nothing here touches a built index: every answer comes from walking the
tokens position by position.  It is the ground truth for the equivalence
checks in ``verify`` and the test suite.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from typing import Sequence

from .config import IngestConfig
from .errors import EmptyQuery, UnsupportedQuery
from .lexicon import FrequencyClass, Lexicon, build_lexicon, count_basic_forms, tokenize
from .matches import Match, sort_matches

STOP = FrequencyClass.STOP
FREQUENT = FrequencyClass.FREQUENT
ORDINARY = FrequencyClass.ORDINARY

SCAN_MODES = ("exact-phrase", "proximity", "doc-conjunction", "planned")


def analyze_corpus(docs: Sequence[Sequence[str]], lexicon: Lexicon) -> list[list[tuple[int, ...]]]:
    cache: dict[str, tuple[int, ...]] = {}
    out = []
    for tokens in docs:
        row = []
        for t in tokens:
            forms = cache.get(t)
            if forms is None:
                forms = cache[t] = tuple(dict.fromkeys(lexicon.analyze(t)))
            row.append(forms)
        out.append(row)
    return out


# -- brute-force index contents ------------------------------------------------

def brute_occurrences(forms_docs, lexicon: Lexicon) -> dict[int, list[tuple[int, int]]]:
    """Every ``(doc, pos)`` of every non-stop form."""
    out: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for doc, row in enumerate(forms_docs):
        for pos, forms in enumerate(row):
            for f in forms:
                if lexicon.classify(f) is not STOP:
                    out[f].append((doc, pos))
    return dict(out)


def brute_annotations(forms_docs, lexicon: Lexicon, config: IngestConfig
                      ) -> dict[tuple[int, int, int], tuple[tuple[int, int], ...]]:
    """``(form, doc, pos) -> ((offset, stop_rank), ...)`` for non-stop occurrences."""
    out = {}
    for doc, row in enumerate(forms_docs):
        for pos, forms in enumerate(row):
            for f in forms:
                cls = lexicon.classify(f)
                if cls is STOP:
                    continue
                md = config.max_distance_frequent if cls is FREQUENT else config.max_distance_ordinary
                near = []
                for off in range(-md, md + 1):
                    p = pos + off
                    if off == 0 or not 0 <= p < len(row):
                        continue
                    near += [(off, r) for r in sorted(lexicon.stop_rank(g) for g in row[p]
                                                     if lexicon.classify(g) is STOP)]
                out[(f, doc, pos)] = tuple(near)
    return out


def brute_stop_phrases(forms_docs, lexicon: Lexicon, min_length: int, max_length: int
                       ) -> dict[tuple[int, ...], set[tuple[int, int]]]:
    """Every window of consecutive stop tokens, keyed by sorted stop ranks."""
    out: dict[tuple[int, ...], set] = defaultdict(set)
    for doc, row in enumerate(forms_docs):
        ranks = [[lexicon.stop_rank(f) for f in forms if lexicon.classify(f) is STOP] for forms in row]
        for p in range(len(row)):
            for length in range(min_length, max_length + 1):
                window = ranks[p:p + length]
                if len(window) < length or not all(window):
                    break
                for combo in itertools.product(*window):
                    out[tuple(sorted(combo))].add((doc, p))
    return dict(out)


def pair_owner(lexicon: Lexicon, a: int, b: int) -> int | None:
    fa = lexicon.classify(a) is FREQUENT
    fb = lexicon.classify(b) is FREQUENT
    if fa and fb:
        return min((a, b), key=lambda f: (lexicon.frequency_rank(f), f))
    if fa:
        return a
    if fb:
        return b
    return None


def processing_distance(lexicon: Lexicon, config: IngestConfig, form: int) -> int:
    top = math.ceil(lexicon.frequent_size * config.top_tier_fraction)
    if lexicon.frequent_rank(form) < top:
        return config.processing_distance_top
    return config.processing_distance_rest


def brute_pairs(forms_docs, lexicon: Lexicon, config: IngestConfig
                ) -> dict[tuple[int, int], set[tuple[int, int, int]]]:
    """All pair postings by O(n^2) enumeration of each document's non-stop entries."""
    out: dict[tuple[int, int], set] = defaultdict(set)
    for doc, row in enumerate(forms_docs):
        entries = [(p, f) for p, forms in enumerate(row) for f in forms if lexicon.classify(f) is not STOP]
        for (pi, fi), (pj, fj) in itertools.combinations(entries, 2):
            if pi == pj:
                continue
            owner = pair_owner(lexicon, fi, fj)
            if owner is None or abs(pj - pi) >= processing_distance(lexicon, config, owner):
                continue
            if fi == fj:
                lo, hi = min(pi, pj), max(pi, pj)
                out[(fi, fi)].add((doc, lo, hi - lo))
            elif owner == fi:
                out[(fi, fj)].add((doc, pi, pj - pi))
            else:
                out[(fj, fi)].add((doc, pj, pi - pj))
    return dict(out)


# -- scanning searches ---------------------------------------------------------

class ScanOracle:
    """Position-by-position search over token sequences.

    ``scan_search`` answers the baseline modes; ``planned_search`` answers
    with the additional-index semantics (query splitting, the basic word,
    admission distances, near-stop windows and the first-occurrence
    fallback), all evaluated directly on the tokens.
    """

    def __init__(self, docs: Sequence[Sequence[str]], lexicon: Lexicon, config: IngestConfig | None = None):
        self.lexicon = lexicon
        self.config = config or IngestConfig()
        self.forms = analyze_corpus(docs, lexicon)
        self.where: dict[int, list[tuple[int, int]]] = defaultdict(list)
        self.doc_first: dict[int, dict[int, int]] = defaultdict(dict)
        for doc, row in enumerate(self.forms):
            for pos, forms in enumerate(row):
                for f in forms:
                    self.where[f].append((doc, pos))
                    self.doc_first[f].setdefault(doc, pos)
        self.stop_ranks = [[frozenset(lexicon.stop_rank(f) for f in forms if lexicon.classify(f) is STOP)
                            for forms in row] for row in self.forms]

    def _query_forms(self, query) -> list[tuple[int, ...]]:
        words = tokenize(query) if isinstance(query, str) else list(query)
        if not words:
            raise EmptyQuery("query has no words")
        if isinstance(words[0], str):
            return [tuple(dict.fromkeys(self.lexicon.analyze(w))) for w in words]
        return [tuple(dict.fromkeys(w)) for w in words]

    def _has(self, doc: int, pos: int, forms) -> bool:
        row = self.forms[doc]
        return 0 <= pos < len(row) and not set(forms).isdisjoint(row[pos])

    def _candidates(self, forms) -> list[tuple[int, int]]:
        return sorted({dp for f in forms for dp in self.where.get(f, ())})

    # -- baseline modes --------------------------------------------------------

    def scan_search(self, query, mode: str = "exact-phrase", distance: int = 5) -> list[Match]:
        if mode == "planned":
            return self.planned_search(query)
        q = self._query_forms(query)
        n = len(q)
        if mode == "exact-phrase":
            rare = min(range(n), key=lambda k: len(self._candidates(q[k])))
            starts = {(d, p - rare) for d, p in self._candidates(q[rare])}
            return sort_matches(
                Match(d, tuple(range(s, s + n)), n - 1)
                for d, s in starts if s >= 0 and all(self._has(d, s + k, q[k]) for k in range(n))
            )
        if mode == "doc-conjunction":
            out = []
            for d in range(len(self.forms)):
                firsts = []
                for forms in q:
                    ps = [self.doc_first[f][d] for f in forms if d in self.doc_first.get(f, {})]
                    if not ps:
                        break
                    firsts.append(min(ps))
                else:
                    out.append(Match(d, tuple(firsts), None))
            return sort_matches(out)
        if mode == "proximity":
            b = self._basic_word(q, range(n))
            out = []
            for d, a in self._candidates(q[b]):
                pos = []
                for k in range(n):
                    if k == b:
                        pos.append(a)
                        continue
                    p = self._closest(d, a, q[k], lambda off: abs(off) < distance)
                    if p is None:
                        break
                    pos.append(p)
                else:
                    out.append(Match(d, tuple(pos), max(pos) - min(pos)))
            return sort_matches(out)
        raise ValueError(f"unknown mode {mode!r}")

    def _basic_word(self, q, positions) -> int:
        best = None
        for k in positions:
            c = min(self.lexicon.count(f) for f in q[k])
            if best is None or c < best[0]:
                best = (c, k)
        return best[1]

    def _closest(self, doc: int, anchor: int, forms, admit, reach: int = 16) -> int | None:
        """Nearest position other than ``anchor`` holding one of ``forms``;
        ties go to the earlier position."""
        for gap in range(1, reach + 1):
            for p in (anchor - gap, anchor + gap):
                if admit(p - anchor) and self._has(doc, p, forms):
                    return p
        return None

    # -- additional-index semantics -------------------------------------------

    def split(self, q) -> list[tuple[tuple[tuple[int, ...], ...], tuple[FrequencyClass, ...]]]:
        per_word = []
        for forms in q:
            groups: dict[FrequencyClass, list[int]] = {}
            for f in forms:
                groups.setdefault(self.lexicon.classify(f), []).append(f)
            per_word.append([(tuple(v), c) for c, v in groups.items()])
        out = []
        for combo in itertools.product(*per_word):
            out.append((tuple(c[0] for c in combo), tuple(c[1] for c in combo)))
        return out

    def planned_search(self, query, fallback: bool = True, exact_order: bool = False,
                       chunking: bool = True) -> list[Match]:
        q = self._query_forms(query)
        results: list[Match] = []
        supported = False
        error = None
        for positions, classes in self.split(q):
            try:
                if all(c is STOP for c in classes):
                    found = self._stop_phrase(positions, exact_order, chunking)
                else:
                    found = self._anchored(positions, classes, exact_order)
                    if not found and fallback:
                        found = self._doc_level(positions, classes)
            except UnsupportedQuery as exc:
                error = exc
                continue
            supported = True
            results += found
        if not supported:
            raise error
        return sort_matches(results)

    def _multiset_at(self, doc: int, start: int, query_sets: set) -> bool:
        window = self.stop_ranks[doc][start:start + len(next(iter(query_sets)))]
        if not all(window):
            return False
        return any(tuple(sorted(c)) in query_sets for c in itertools.product(*window))

    def _stop_phrase(self, positions, exact: bool, chunking: bool) -> list[Match]:
        cfg = self.config
        n = len(positions)
        if n < cfg.min_length:
            raise UnsupportedQuery("stop phrase too short")
        if n > cfg.max_length and not chunking:
            raise UnsupportedQuery("stop phrase too long")
        width = min(n, cfg.max_length)
        ranks = [[self.lexicon.stop_rank(f) for f in forms] for forms in positions]
        chunk_sets = [
            {tuple(sorted(c)) for c in itertools.product(*ranks[j:j + width])}
            for j in range(n - width + 1)
        ]
        rare = min(range(n), key=lambda k: len(self._candidates(positions[k])))
        starts = {(d, p - off) for d, p in self._candidates(positions[rare]) for off in range(n)}
        out = []
        for d, s in sorted(starts):
            if s < 0 or s + n > len(self.forms[d]):
                continue
            if not all(self._multiset_at(d, s + j, chunk_sets[j]) for j in range(len(chunk_sets))):
                continue
            if exact and not all(self._has(d, s + k, positions[k]) for k in range(n)):
                continue
            out.append(Match(d, tuple(range(s, s + n)), n - 1))
        return out

    def _anchored(self, positions, classes, exact: bool) -> list[Match]:
        lex, cfg = self.lexicon, self.config
        n = len(positions)
        nonstop = [k for k in range(n) if classes[k] is not STOP]
        b = self._basic_word(positions, nonstop)
        out = []
        for fb in positions[b]:
            md = cfg.max_distance_frequent if classes[b] is FREQUENT else cfg.max_distance_ordinary
            for d, a in self.where.get(fb, ()):
                pos = [None] * n
                pos[b] = a
                for k in range(n):
                    if k == b:
                        continue
                    if classes[k] is STOP:
                        wanted = {lex.stop_rank(f) for f in positions[k]}
                        hit = None
                        for gap in range(1, md + 1):
                            for off in (-gap, gap):
                                p = a + off
                                if exact and off != k - b:
                                    continue
                                if 0 <= p < len(self.forms[d]) and wanted & self.stop_ranks[d][p]:
                                    hit = p
                                    break
                            if hit is not None:
                                break
                    else:
                        hit = self._near_word(d, a, fb, positions[k], classes[k], classes[b], exact, k - b)
                    if hit is None:
                        break
                    pos[k] = hit
                else:
                    out.append(Match(d, tuple(pos), max(pos) - min(pos)))
        return out

    def _near_word(self, doc, anchor, fb, forms, cls_k, cls_b, exact: bool, shift: int) -> int | None:
        lex, cfg = self.lexicon, self.config
        if cls_k is FREQUENT or cls_b is FREQUENT:
            limits = {fk: processing_distance(lex, cfg, pair_owner(lex, fk, fb)) for fk in forms}
        else:
            limits = {fk: cfg.ordinary_distance for fk in forms}
        row = self.forms[doc]

        def ok(p):
            if p == anchor or not 0 <= p < len(row):
                return False
            return any(fk in row[p] and abs(p - anchor) < limits[fk] for fk in forms)

        if exact:
            return anchor + shift if ok(anchor + shift) else None
        for gap in range(1, max(limits.values())):
            for p in (anchor - gap, anchor + gap):
                if ok(p):
                    return p
        return None

    def _doc_level(self, positions, classes) -> list[Match]:
        nonstop = [k for k in range(len(positions)) if classes[k] is not STOP]
        docs = None
        for k in nonstop:
            present = {d for f in positions[k] for d in self.doc_first.get(f, {})}
            docs = present if docs is None else docs & present
        out = []
        for d in sorted(docs or ()):
            pos = tuple(
                min(self.doc_first[f][d] for f in positions[k] if d in self.doc_first.get(f, {}))
                if classes[k] is not STOP else None
                for k in range(len(positions))
            )
            out.append(Match(d, pos, None))
        return out


def scan_search(corpus, query, mode: str = "exact-phrase", distance: int = 5,
                lexicon: Lexicon | None = None, config: IngestConfig | None = None) -> list[Match]:
    """One-shot scan over raw documents (strings or token lists)."""
    docs = [tokenize(d) if isinstance(d, str) else list(d) for d in corpus]
    config = config or IngestConfig()
    if lexicon is None:
        lexicon = build_lexicon({}, count_basic_forms(docs, {}), config.stop_size, config.frequent_size)
    return ScanOracle(docs, lexicon, config).scan_search(query, mode, distance)
