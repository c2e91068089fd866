"""Conventional positional inverted index over every basic form.

This is the comparison system: each query word's full posting list is read
regardless of how early a match is found.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Sequence

import numpy as np

from .errors import DecodeError, EmptyQuery
from .lexicon import Lexicon, tokenize
from .matches import Match, sort_matches
from .storage.keystore import NS_BASELINE, KeyStore
from .storage.streams import ReadStats, SegmentReader, SegmentWriter
from .storage.varint import read_varint, write_varint

MODES = ("exact-phrase", "proximity", "doc-conjunction")


def baseline_key(form: int) -> bytes:
    out = bytearray([NS_BASELINE])
    write_varint(out, form)
    return bytes(out)


def parse_baseline_key(raw: bytes) -> int:
    if not raw or raw[0] != NS_BASELINE:
        raise DecodeError("not a baseline key")
    form, off = read_varint(raw, 1)
    if off != len(raw):
        raise DecodeError("trailing bytes in baseline key")
    return form


def pack(docs: np.ndarray, pos: np.ndarray) -> np.ndarray:
    return (docs.astype(np.int64) << 32) | pos.astype(np.int64)


def basic_word_position(lexicon: Lexicon, positions: Sequence[Sequence[int]]) -> int:
    """Leftmost position whose rarest form has the smallest corpus count."""
    best = None
    best_count = None
    for i, forms in enumerate(positions):
        c = min(lexicon.count(f) for f in forms)
        if best_count is None or c < best_count:
            best, best_count = i, c
    return best


class BaselineIndexBuilder:
    def __init__(self):
        self._postings: dict[int, list[tuple[int, int]]] = defaultdict(list)

    def add(self, form: int, doc: int, pos: int) -> None:
        self._postings[form].append((doc, pos))

    def write(self, writer: SegmentWriter, keys: KeyStore) -> None:
        for form in sorted(self._postings):
            keys.put(baseline_key(form), writer.append_stream(self._postings[form]))


def closest_within(anchors: np.ndarray, targets: np.ndarray, limit: int, inclusive: bool = False
                   ) -> tuple[np.ndarray, np.ndarray]:
    """For packed anchor keys, the closest packed target in the same document.

    Returns ``(found_mask, chosen_target)``; the target must differ from the
    anchor and lie strictly within ``limit`` positions (or up to ``limit``
    when ``inclusive``).  Ties go to the earlier position.
    """
    n = anchors.size
    found = np.zeros(n, dtype=bool)
    chosen = np.zeros(n, dtype=np.int64)
    if n == 0 or targets.size == 0:
        return found, chosen
    left = np.searchsorted(targets, anchors, side="left") - 1
    right = np.searchsorted(targets, anchors, side="right")
    best_gap = np.full(n, np.iinfo(np.int64).max)
    adoc = anchors >> 32
    for idx in (left, right):
        ok = (idx >= 0) & (idx < targets.size)
        cand = targets[np.clip(idx, 0, targets.size - 1)]
        gap = np.abs(cand - anchors)
        ok &= (cand >> 32) == adoc
        ok &= (gap <= limit) if inclusive else (gap < limit)
        better = ok & (gap < best_gap)
        chosen = np.where(better, cand, chosen)
        best_gap = np.where(better, gap, best_gap)
        found |= ok
    return found, chosen


class BaselineIndex:
    def __init__(self, keys: KeyStore, segments: SegmentReader, lexicon: Lexicon):
        self.keys = keys
        self.segments = segments
        self.lexicon = lexicon

    def posting_arrays(self, form: int, stats: ReadStats | None = None) -> tuple[np.ndarray, np.ndarray]:
        if stats is not None:
            stats.keys_probed += 1
        d = self.keys.get(baseline_key(form))
        if d is None:
            empty = np.empty(0, dtype=np.int64)
            return empty, empty
        return self.segments.read_posting_arrays(d, stats, kind="baseline")

    def list_length(self, form: int) -> int:
        d = self.keys.get(baseline_key(form))
        return 0 if d is None else d.count

    def _position_keys(self, positions, stats, cache):
        out = []
        for forms in positions:
            parts = []
            for f in forms:
                if f not in cache:
                    cache[f] = pack(*self.posting_arrays(f, stats))
                parts.append(cache[f])
            out.append(np.unique(np.concatenate(parts)) if len(parts) > 1 else parts[0])
        return out

    def search(self, positions: Sequence[Sequence[int]], mode: str = "exact-phrase", distance: int = 5,
               stats: ReadStats | None = None) -> list[Match]:
        """Search with one form list per query word.

        ``proximity`` anchors on the rarest word and takes, for every other
        word, the closest occurrence strictly within ``distance``.
        """
        if not positions:
            raise EmptyQuery("empty query")
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        keys = self._position_keys(positions, stats, {})
        n = len(positions)
        if mode == "exact-phrase":
            starts = keys[0]
            for k in range(1, n):
                starts = starts[np.isin(starts + k, keys[k])]
            return sort_matches(
                Match(s >> 32, tuple((s & 0xFFFFFFFF) + k for k in range(n)), n - 1)
                for s in starts.tolist()
            )
        if mode == "doc-conjunction":
            docs = None
            firsts = []
            for k in keys:
                d = k >> 32
                udocs, idx = np.unique(d, return_index=True)
                firsts.append(dict(zip(udocs.tolist(), (k[idx] & 0xFFFFFFFF).tolist())))
                docs = set(udocs.tolist()) if docs is None else docs & set(udocs.tolist())
            return sort_matches(Match(d, tuple(f[d] for f in firsts), None) for d in docs)
        b = basic_word_position(self.lexicon, positions)
        anchors = keys[b]
        ok = np.ones(anchors.size, dtype=bool)
        chosen = []
        for k in range(n):
            if k == b:
                chosen.append(anchors)
                continue
            found, pick = closest_within(anchors, keys[k], distance)
            ok &= found
            chosen.append(pick)
        out = []
        for i in np.flatnonzero(ok).tolist():
            pos = tuple(int(c[i] & 0xFFFFFFFF) for c in chosen)
            out.append(Match(int(anchors[i] >> 32), pos, max(pos) - min(pos)))
        return sort_matches(out)

    def search_query(self, query: str, mode: str = "exact-phrase", distance: int = 5,
                     stats: ReadStats | None = None) -> list[Match]:
        words = tokenize(query)
        return self.search([self.lexicon.analyze(w) for w in words], mode, distance, stats)
