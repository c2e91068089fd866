"""Expanded (word-pair) index for frequent forms.

For a frequent form ``w`` and a non-stop form ``v`` the pair stream holds
every occurrence of ``w`` that has ``v`` closer than
``processing_distance(w)``, together with the signed distance to ``v``.
A pair of two frequent forms is stored once, under the more frequent form.
"""

from __future__ import annotations

import math
from collections import defaultdict
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .config import IngestConfig
from .errors import DecodeError, WrongIndex
from .lexicon import FrequencyClass, Lexicon
from .storage.keystore import NS_PAIR, KeyStore
from .storage.streams import ReadStats, SegmentReader, SegmentWriter
from .storage.varint import decode_pair_postings, encode_pair_postings, read_varint, write_varint


class PairKey(NamedTuple):
    w: int
    v: int


class ExpandedPosting(NamedTuple):
    doc: int
    pos_w: int
    dist: int


class DistanceRules:
    """Admission distances derived from the lexicon and build config."""

    def __init__(self, lexicon: Lexicon, config: IngestConfig):
        self.lexicon = lexicon
        self.config = config
        self.top_tier_size = math.ceil(lexicon.frequent_size * config.top_tier_fraction)
        self.max_processing_distance = max(config.processing_distance_top, config.processing_distance_rest)

    def is_frequent(self, form: int) -> bool:
        return self.lexicon.classify(form) is FrequencyClass.FREQUENT

    def processing_distance(self, form: int) -> int:
        rank = self.lexicon.frequent_rank(form)
        if rank is None:
            raise WrongIndex(f"{self.lexicon.surface(form)!r} is not a frequent form")
        if rank < self.top_tier_size:
            return self.config.processing_distance_top
        return self.config.processing_distance_rest

    def max_distance(self, form: int) -> int:
        cls = self.lexicon.classify(form)
        if cls is FrequencyClass.FREQUENT:
            return self.config.max_distance_frequent
        if cls is FrequencyClass.ORDINARY:
            return self.config.max_distance_ordinary
        raise WrongIndex("stop forms carry no near-stop window")

    def canonical(self, a: int, b: int) -> PairKey:
        fa, fb = self.is_frequent(a), self.is_frequent(b)
        if fa and fb:
            lex = self.lexicon
            if (lex.frequency_rank(b), b) < (lex.frequency_rank(a), a):
                return PairKey(b, a)
            return PairKey(a, b)
        if fa:
            return PairKey(a, b)
        if fb:
            return PairKey(b, a)
        raise WrongIndex("neither form owns an expanded index")

    def admission_distance(self, a: int, b: int) -> int:
        """Exclusive bound on ``|pos_a - pos_b|`` for the pair to count as near."""
        if self.is_frequent(a) or self.is_frequent(b):
            return self.processing_distance(self.canonical(a, b).w)
        return self.config.ordinary_distance


def pair_key_bytes(key: PairKey) -> bytes:
    out = bytearray([NS_PAIR])
    write_varint(out, key.w)
    write_varint(out, key.v)
    return bytes(out)


def parse_pair_key(raw: bytes) -> PairKey:
    if not raw or raw[0] != NS_PAIR:
        raise DecodeError("not a pair key")
    w, off = read_varint(raw, 1)
    v, off = read_varint(raw, off)
    if off != len(raw):
        raise DecodeError("trailing bytes in pair key")
    return PairKey(w, v)


def emit_pairs(window: Sequence[tuple[int, int]], rules: DistanceRules, doc: int = 0
               ) -> Iterator[tuple[PairKey, ExpandedPosting]]:
    """Pair postings of one document.

    ``window`` holds ``(position, form)`` entries of non-stop forms sorted by
    position; a token with several forms contributes several entries.
    """
    reach = rules.max_processing_distance
    frequent = {f: rules.is_frequent(f) for _, f in window}
    n = len(window)
    for i in range(n):
        pi, fi = window[i]
        for j in range(i + 1, n):
            pj, fj = window[j]
            if pj - pi >= reach:
                break
            if pj == pi or not (frequent[fi] or frequent[fj]):
                continue
            if fi == fj:
                key, pos_w, dist = PairKey(fi, fi), pi, pj - pi
            else:
                key = rules.canonical(fi, fj)
                pos_w, dist = (pi, pj - pi) if key.w == fi else (pj, pi - pj)
            if abs(dist) < rules.processing_distance(key.w):
                yield key, ExpandedPosting(doc, pos_w, dist)


class ExpandedIndexBuilder:
    def __init__(self, rules: DistanceRules):
        self.rules = rules
        self._postings: dict[PairKey, list[ExpandedPosting]] = defaultdict(list)

    def add_document(self, doc: int, window: Sequence[tuple[int, int]]) -> None:
        for key, posting in emit_pairs(window, self.rules, doc):
            self._postings[key].append(posting)

    def write(self, writer: SegmentWriter, keys: KeyStore) -> None:
        encoded = sorted((pair_key_bytes(k), k) for k in self._postings)
        for raw, key in encoded:
            postings = sorted(self._postings[key])
            keys.put(raw, writer.append_bytes(encode_pair_postings(postings), len(postings)))


class ExpandedIndex:
    """Read side: resolves orientation so callers never care which way a pair was stored."""

    def __init__(self, keys: KeyStore, segments: SegmentReader, rules: DistanceRules):
        self.keys = keys
        self.segments = segments
        self.rules = rules

    def stored_arrays(self, key: PairKey, stats: ReadStats | None = None):
        if stats is not None:
            stats.keys_probed += 1
        d = self.keys.get(pair_key_bytes(key))
        if d is None:
            empty = np.empty(0, dtype=np.int64)
            return empty, empty, empty
        data = self.segments.read_bytes(d, stats)
        try:
            arrays = decode_pair_postings(data, d.count)
        except DecodeError as exc:
            raise DecodeError(f"pair {tuple(key)} stream {d}: {exc}") from exc
        if stats is not None:
            stats.add("pair", d.count)
        return arrays

    def pair_arrays(self, w: int, v: int, stats: ReadStats | None = None):
        """``(docs, pos_w, pos_v)`` arrays sorted by ``(doc, pos_w, pos_v)``."""
        key = self.rules.canonical(w, v)
        docs, pos, dist = self.stored_arrays(key, stats)
        if w == v:
            docs = np.concatenate([docs, docs])
            pos_w = np.concatenate([pos, pos + dist])
            pos_v = np.concatenate([pos + dist, pos])
        elif key.w == w:
            pos_w, pos_v = pos, pos + dist
        else:
            pos_w, pos_v = pos + dist, pos
        order = np.lexsort((pos_v, pos_w, docs))
        return docs[order], pos_w[order], pos_v[order]

    def lookup_pair(self, w: int, v: int, stats: ReadStats | None = None) -> Iterator[tuple[int, int, int]]:
        docs, pw, pv = self.pair_arrays(w, v, stats)
        return zip(docs.tolist(), pw.tolist(), pv.tolist())

    def entries(self) -> Iterable[tuple[PairKey, list[ExpandedPosting]]]:
        for raw, d in self.keys.items(bytes([NS_PAIR])):
            key = parse_pair_key(raw)
            docs, pos, dist = decode_pair_postings(self.segments.read_bytes(d), d.count)
            yield key, [ExpandedPosting(*t) for t in zip(docs.tolist(), pos.tolist(), dist.tolist())]
