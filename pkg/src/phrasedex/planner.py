"""Query planning and execution over the additional indexes.

A raw query is one basic-form list per word.  Words whose forms span
several frequency classes are split into class-homogeneous copies; each
copy is one of four types:

* Type 1 -- only stop words: stop-phrase index lookup.
* Type 2 -- only frequent words: pair lookups against the basic word.
* Type 3 -- no stop words, at least one ordinary word: as Type 2, with the
  basic index joining ordinary-ordinary pairs.
* Type 4 -- stop and non-stop words: near-stop annotations of the basic word
  plus the Type 3 machinery for the remaining non-stop words.

Types 2-4 fall back to a document-level conjunction over first occurrences
when the distance-aware search finds nothing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .baseline import basic_word_position, closest_within, pack
from .errors import EmptyQuery, UnsupportedQuery
from .lexicon import FrequencyClass, Lexicon, tokenize
from .matches import Match, sort_matches
from .storage.streams import ReadStats

STOP = FrequencyClass.STOP
FREQUENT = FrequencyClass.FREQUENT
ORDINARY = FrequencyClass.ORDINARY

_LOW32 = 0xFFFFFFFF


class QueryType(Enum):
    TYPE1 = 1
    TYPE2 = 2
    TYPE3 = 3
    TYPE4 = 4


@dataclass(frozen=True)
class TypedQuery:
    positions: tuple[tuple[int, ...], ...]
    classes: tuple[FrequencyClass, ...]

    def __len__(self) -> int:
        return len(self.positions)


@dataclass(frozen=True)
class QueryPlan:
    qtype: QueryType
    basic_word: int | None
    pair_lookups: tuple[tuple[int, int], ...]
    join_lookups: tuple[tuple[int, int], ...]
    stop_positions: tuple[int, ...]
    fallback: bool


def parse_query(query: str | Sequence[str], lexicon: Lexicon) -> list[list[int]]:
    words = tokenize(query) if isinstance(query, str) else [w for w in query]
    if not words:
        raise EmptyQuery("query has no words")
    return [lexicon.analyze(w) for w in words]


def split_query(raw: Sequence[Sequence[int]], lexicon: Lexicon) -> list[TypedQuery]:
    """Expand positions whose forms differ in class into one copy per class."""
    if not raw:
        raise EmptyQuery("query has no words")
    out: list[TypedQuery] = []

    def expand(i: int, positions: list, classes: list) -> None:
        if i == len(raw):
            out.append(TypedQuery(tuple(positions), tuple(classes)))
            return
        groups: dict[FrequencyClass, list[int]] = {}
        for f in dict.fromkeys(raw[i]):
            groups.setdefault(lexicon.classify(f), []).append(f)
        for cls in sorted(groups):
            positions.append(tuple(groups[cls]))
            classes.append(cls)
            expand(i + 1, positions, classes)
            positions.pop()
            classes.pop()

    expand(0, [], [])
    return out


def classify_query(q: TypedQuery, lexicon: Lexicon, fallback: bool = True) -> QueryPlan:
    classes = set(q.classes)
    stops = tuple(i for i, c in enumerate(q.classes) if c is STOP)
    if classes == {STOP}:
        return QueryPlan(QueryType.TYPE1, None, (), (), stops, False)
    if STOP in classes:
        qtype = QueryType.TYPE4
    elif classes == {FREQUENT}:
        qtype = QueryType.TYPE2
    else:
        qtype = QueryType.TYPE3
    nonstop = [i for i, c in enumerate(q.classes) if c is not STOP]
    b = nonstop[basic_word_position(lexicon, [q.positions[i] for i in nonstop])]
    pairs, joins = [], []
    for k in nonstop:
        if k == b:
            continue
        if q.classes[k] is FREQUENT or q.classes[b] is FREQUENT:
            pairs.append((k, b))
        else:
            joins.append((k, b))
    return QueryPlan(qtype, b, tuple(pairs), tuple(joins), stops, fallback)


def _best_per_anchor(anchor_keys: np.ndarray, cand_pos: np.ndarray):
    """Closest candidate per anchor (ties to the earlier position).

    Returns sorted unique anchor keys and the chosen positions.
    """
    if anchor_keys.size == 0:
        return anchor_keys, cand_pos
    gap = np.abs(cand_pos - (anchor_keys & _LOW32))
    order = np.lexsort((cand_pos, gap, anchor_keys))
    keys = anchor_keys[order]
    pos = cand_pos[order]
    uniq, first = np.unique(keys, return_index=True)
    return uniq, pos[first]


class _Reads:
    """Per-query stream cache: each stream is read (and counted) once."""

    def __init__(self, index, stats: ReadStats):
        self.index = index
        self.stats = stats
        self._occ: dict[int, np.ndarray] = {}
        self._ann: dict[int, list] = {}
        self._pairs: dict[tuple[int, int], tuple] = {}
        self._first: dict[int, tuple] = {}

    def occ(self, form: int) -> np.ndarray:
        if form not in self._occ:
            self._occ[form] = pack(*self.index.basic.occurrence_arrays(form, self.stats))
        return self._occ[form]

    def ann(self, form: int) -> list:
        if form not in self._ann:
            self._ann[form] = self.index.basic.annotations(form, self.stats)
        return self._ann[form]

    def pairs(self, w: int, v: int):
        if (w, v) not in self._pairs:
            self._pairs[(w, v)] = self.index.expanded.pair_arrays(w, v, self.stats)
        return self._pairs[(w, v)]

    def first(self, form: int):
        if form not in self._first:
            self._first[form] = self.index.basic.first_occurrence_arrays(form, self.stats)
        return self._first[form]


class QueryPlanner:
    def __init__(self, index, fallback: bool = True, exact_order: bool = False, chunking: bool = True):
        self.index = index
        self.lexicon = index.lexicon
        self.rules = index.rules
        self.fallback = fallback
        self.exact_order = exact_order
        self.chunking = chunking

    # -- planning -------------------------------------------------------------

    def split_query(self, raw):
        return split_query(raw, self.lexicon)

    def classify_query(self, q: TypedQuery, fallback: bool | None = None) -> QueryPlan:
        return classify_query(q, self.lexicon, self.fallback if fallback is None else fallback)

    # -- execution ------------------------------------------------------------

    def execute(self, plan: QueryPlan, q: TypedQuery, stats: ReadStats | None = None,
                exact_order: bool | None = None) -> list[Match]:
        stats = stats if stats is not None else ReadStats()
        exact = self.exact_order if exact_order is None else exact_order
        reads = _Reads(self.index, stats)
        if plan.qtype is QueryType.TYPE1:
            return self._stop_phrase(q, stats, exact)
        found = self._distance_aware(plan, q, reads, exact)
        if not found and plan.fallback:
            return self._distance_free(q, reads)
        return found

    def execute_fallback(self, q: TypedQuery, stats: ReadStats | None = None) -> list[Match]:
        """Document-level conjunction over first occurrences only."""
        return self._distance_free(q, _Reads(self.index, stats if stats is not None else ReadStats()))

    def _stop_phrase(self, q: TypedQuery, stats: ReadStats, exact: bool) -> list[Match]:
        n = len(q)
        sp = self.index.stop_phrases
        if n < sp.min_length:
            raise UnsupportedQuery(
                f"stop-word queries need at least {sp.min_length} words; no standalone stop-word lists exist"
            )
        if n <= sp.max_length:
            starts = pack(*sp.lookup_arrays(q.positions, stats))
        elif self.chunking:
            width = sp.max_length
            starts = None
            for j in range(n - width + 1):
                chunk = pack(*sp.lookup_arrays(q.positions[j:j + width], stats)) - j
                starts = chunk if starts is None else np.intersect1d(starts, chunk, assume_unique=True)
        else:
            raise UnsupportedQuery(f"stop phrase longer than {sp.max_length} and chunking disabled")
        out = []
        for s in starts.tolist():
            doc, p = s >> 32, s & _LOW32
            if exact and not self._in_order(doc, p, q):
                continue
            out.append(Match(doc, tuple(range(p, p + n)), n - 1))
        return sort_matches(out)

    def _in_order(self, doc: int, start: int, q: TypedQuery) -> bool:
        tokens = self.index.documents.tokens(doc)
        for i, forms in enumerate(q.positions):
            p = start + i
            if p >= len(tokens) or not set(forms).intersection(self.lexicon.analyze(tokens[p])):
                return False
        return True

    def _distance_aware(self, plan: QueryPlan, q: TypedQuery, reads: _Reads, exact: bool) -> list[Match]:
        b = plan.basic_word
        n = len(q)
        lex = self.lexicon
        out: list[Match] = []
        for fb in q.positions[b]:
            chosen: dict[int, tuple[np.ndarray, np.ndarray]] = {}
            anchors = None
            for k, _ in plan.pair_lookups:
                keys, pos = [], []
                for fk in q.positions[k]:
                    docs, pk, pb = reads.pairs(fk, fb)
                    if exact:
                        sel = (pk - pb) == (k - b)
                        docs, pk, pb = docs[sel], pk[sel], pb[sel]
                    keys.append(pack(docs, pb))
                    pos.append(pk)
                uk, up = _best_per_anchor(np.concatenate(keys), np.concatenate(pos))
                chosen[k] = (uk, up)
                anchors = uk if anchors is None else np.intersect1d(anchors, uk, assume_unique=True)
            ann_index = None
            if plan.stop_positions:
                occ = reads.occ(fb)
                anchors = occ if anchors is None else np.intersect1d(anchors, occ, assume_unique=True)
                ann_index = occ
            elif anchors is None:
                anchors = reads.occ(fb)
            if anchors.size == 0:
                continue
            ok = np.ones(anchors.size, dtype=bool)
            columns: dict[int, np.ndarray] = {b: anchors & _LOW32}
            for k, (uk, up) in chosen.items():
                columns[k] = up[np.searchsorted(uk, anchors)]
            limit = self.index.config.ordinary_distance
            for k, _ in plan.join_lookups:
                targets = np.unique(np.concatenate([reads.occ(fk) for fk in q.positions[k]]))
                if exact:
                    shift = k - b
                    found = np.isin(anchors + shift, targets) & (abs(shift) < limit)
                    columns[k] = (anchors & _LOW32) + shift
                else:
                    found, pick = closest_within(anchors, targets, limit)
                    columns[k] = pick & _LOW32
                ok &= found
            if plan.stop_positions:
                ann = reads.ann(fb)
                rows = np.searchsorted(ann_index, anchors).tolist()
                for k in plan.stop_positions:
                    ranks = {lex.stop_rank(f) for f in q.positions[k]}
                    col = np.zeros(anchors.size, dtype=np.int64)
                    for i, row in enumerate(rows):
                        if not ok[i]:
                            continue
                        best = None
                        for off, r in ann[row]:
                            if r in ranks and (not exact or off == k - b):
                                if best is None or (abs(off), off) < (abs(best), best):
                                    best = off
                        if best is None:
                            ok[i] = False
                        else:
                            col[i] = best
                    columns[k] = (anchors & _LOW32) + col
            for i in np.flatnonzero(ok).tolist():
                pos = tuple(int(columns[k][i]) for k in range(n))
                out.append(Match(int(anchors[i] >> 32), pos, max(pos) - min(pos)))
        return sort_matches(out)

    def _distance_free(self, q: TypedQuery, reads: _Reads) -> list[Match]:
        per_position: dict[int, dict[int, int]] = {}
        for k, cls in enumerate(q.classes):
            if cls is STOP:
                continue
            firsts: dict[int, int] = {}
            for f in q.positions[k]:
                docs, first, _ = reads.first(f)
                for d, p in zip(docs.tolist(), first.tolist()):
                    if d not in firsts or p < firsts[d]:
                        firsts[d] = p
            per_position[k] = firsts
        if not per_position:
            return []
        docs = set.intersection(*(set(m) for m in per_position.values()))
        return sort_matches(
            Match(d, tuple(per_position[k][d] if k in per_position else None for k in range(len(q))), None)
            for d in docs
        )

    # -- whole queries --------------------------------------------------------

    @staticmethod
    def combine(results: Sequence[Sequence[Match]]) -> list[Match]:
        return sort_matches(itertools.chain.from_iterable(results))

    def search(self, query, stats: ReadStats | None = None, fallback: bool | None = None,
               exact_order: bool | None = None, max_results: int | None = None) -> list[Match]:
        """Run a query string (or a list of per-word form lists)."""
        stats = stats if stats is not None else ReadStats()
        if isinstance(query, str) or (query and isinstance(query[0], str)):
            raw = parse_query(query, self.lexicon)
        else:
            raw = query
        results = []
        errors = []
        for q in self.split_query(raw):
            plan = self.classify_query(q, fallback)
            try:
                results.append(self.execute(plan, q, stats, exact_order))
            except UnsupportedQuery as exc:
                errors.append(exc)
        if not results:
            raise errors[0]
        combined = self.combine(results)
        return combined[:max_results] if max_results is not None else combined
