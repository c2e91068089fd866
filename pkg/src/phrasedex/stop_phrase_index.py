"""Index of stop-word phrases.

Every run of consecutive stop tokens contributes all of its sub-phrases of
length ``min_length .. max_length``.  A phrase is keyed by the ascending
multiset of its stop-list indices, so lookups ignore word order.

Phrases are enumerated with a queue of at most ``max_length`` tokens.  All
phrases starting at the front token are emitted at the moment that token
leaves the queue, either because the queue overflowed or because the run
ended.
"""

from __future__ import annotations

import itertools
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import DecodeError, IndexCorrupt, SequenceError, UnsupportedQuery
from .lexicon import Lexicon
from .storage.huffman import HuffmanTable
from .storage.keystore import NS_STOP_PHRASE, KeyStore
from .storage.streams import ReadStats, SegmentReader, SegmentWriter
from .storage.varint import decode_postings, decode_varints, encode_varints

logger = logging.getLogger(__name__)


class PhrasePosting(NamedTuple):
    doc: int
    pos: int


@dataclass(eq=False)
class QueueItem:
    doc: int
    pos: int
    forms: list[int]
    index: int = 0
    next: "QueueItem | None" = field(default=None, repr=False)


class StopKeyCodec:
    """Turns a sorted stop-index multiset into key bytes and back."""

    def __init__(self, table: HuffmanTable | None = None):
        self.table = table

    def encode(self, ranks: Sequence[int]) -> bytes:
        body = self.table.encode(ranks) if self.table is not None else encode_varints(ranks)
        return bytes([NS_STOP_PHRASE]) + body

    def decode(self, raw: bytes) -> tuple[int, ...]:
        if not raw or raw[0] != NS_STOP_PHRASE:
            raise DecodeError("not a stop-phrase key")
        body = raw[1:]
        if self.table is not None:
            return tuple(self.table.decode(body))
        return tuple(decode_varints(body).tolist())


class StopPhraseQueue:
    """Sliding queue over one run of consecutive stop tokens.

    ``push`` and ``flush`` return the ``(key, posting)`` pairs emitted, where
    ``key`` is ``encode(sorted stop ranks)``; with no encoder the key is the
    sorted rank tuple itself.
    """

    def __init__(self, min_length: int, max_length: int, stop_rank: Mapping[int, int] | Callable[[int], int | None],
                 encode: Callable[[tuple[int, ...]], object] | None = None, cap: int = 64):
        self.min_length = min_length
        self.max_length = max_length
        self._rank = stop_rank.get if isinstance(stop_rank, Mapping) else stop_rank
        self._encode = encode
        self.cap = cap
        self.head: QueueItem | None = None
        self.tail: QueueItem | None = None
        self.length = 0

    def push(self, doc: int, pos: int, forms: Sequence[int]) -> list[tuple[object, PhrasePosting]]:
        if not forms:
            raise ValueError("a queued token needs at least one stop form")
        if self.tail is not None and (doc != self.tail.doc or pos != self.tail.pos + 1):
            raise SequenceError(
                f"token ({doc}, {pos}) does not follow ({self.tail.doc}, {self.tail.pos}) without a flush"
            )
        item = QueueItem(doc, pos, list(forms))
        if self.tail is None:
            self.head = self.tail = item
        else:
            self.tail.next = item
            self.tail = item
        self.length += 1
        if self.length > self.max_length:
            out = self.emit_front()
            self._evict()
            return out
        return []

    def flush(self) -> list[tuple[object, PhrasePosting]]:
        out = []
        while self.head is not None:
            out.extend(self.emit_front())
            self._evict()
        return out

    def _evict(self) -> None:
        self.head = self.head.next
        self.length -= 1
        if self.head is None:
            self.tail = None

    def emit_front(self) -> list[tuple[object, PhrasePosting]]:
        front = self.head
        if front is None:
            raise IndexError("emit_front on an empty queue")
        seen: dict[int, set] = defaultdict(set)
        out: list[tuple[object, PhrasePosting]] = []
        posting = PhrasePosting(front.doc, front.pos)

        def process(item: QueueItem | None, length: int) -> None:
            if item is None or length > self.max_length:
                return
            for idx in range(len(item.forms)):
                item.index = idx
                process(item.next, length + 1)
                if length < self.min_length:
                    continue
                word_ids = []
                current = front
                for _ in range(length):
                    word_ids.append(current.forms[current.index])
                    current = current.next
                ranks = []
                for f in word_ids:
                    r = self._rank(f)
                    if r is None:
                        raise IndexCorrupt(f"queued form {f} has no stop-list number")
                    ranks.append(r)
                ranks.sort()
                key = tuple(ranks)
                bucket = seen[length]
                if key in bucket:
                    continue
                if len(bucket) >= self.cap:
                    if len(bucket) == self.cap:
                        logger.warning("form fan-out at (%d, %d) length %d exceeds cap %d; truncating",
                                       front.doc, front.pos, length, self.cap)
                        bucket.add(None)
                    continue
                bucket.add(key)
                out.append((self._encode(key) if self._encode else key, posting))

        process(front, 1)
        return out


class StopPhraseIndexBuilder:
    """Collects phrase postings during ingest; keys are encoded at write time
    once stop-form weights for the Huffman table are known."""

    def __init__(self, min_length: int, max_length: int, lexicon: Lexicon, cap: int = 64):
        self.lexicon = lexicon
        self.queue = StopPhraseQueue(min_length, max_length, lexicon.stop_rank, cap=cap)
        self._postings: dict[tuple[int, ...], list[PhrasePosting]] = defaultdict(list)
        self.stop_weights: dict[int, int] = defaultdict(int)

    def _collect(self, emitted) -> None:
        for key, posting in emitted:
            self._postings[key].append(posting)

    def push(self, doc: int, pos: int, stop_forms: Sequence[int]) -> None:
        for f in stop_forms:
            self.stop_weights[self.lexicon.stop_rank(f)] += 1
        self._collect(self.queue.push(doc, pos, stop_forms))

    def flush(self) -> None:
        self._collect(self.queue.flush())

    def huffman_table(self) -> HuffmanTable:
        return HuffmanTable.from_counts(self.stop_weights, self.lexicon.stop_size)

    def write(self, writer: SegmentWriter, keys: KeyStore, codec: StopKeyCodec) -> None:
        self.flush()
        encoded = sorted((codec.encode(k), k) for k in self._postings)
        for raw, key in encoded:
            postings = sorted(set(self._postings[key]))
            keys.put(raw, writer.append_stream(postings))


class StopPhraseIndex:
    def __init__(self, keys: KeyStore, segments: SegmentReader, lexicon: Lexicon, codec: StopKeyCodec,
                 min_length: int, max_length: int):
        self.keys = keys
        self.segments = segments
        self.lexicon = lexicon
        self.codec = codec
        self.min_length = min_length
        self.max_length = max_length

    def key_for(self, stop_forms: Sequence[int]) -> bytes:
        ranks = []
        for f in stop_forms:
            r = self.lexicon.stop_rank(f)
            if r is None:
                raise UnsupportedQuery(f"{self.lexicon.surface(f)!r} is not a stop form")
            ranks.append(r)
        return self.codec.encode(sorted(ranks))

    def lookup_arrays(self, stop_forms: Sequence[Sequence[int]], stats: ReadStats | None = None
                      ) -> tuple[np.ndarray, np.ndarray]:
        """Union of window starts over every form assignment, deduplicated and sorted."""
        n = len(stop_forms)
        if not self.min_length <= n <= self.max_length:
            raise UnsupportedQuery(
                f"stop phrases of length {n} are not indexed (range {self.min_length}..{self.max_length})"
            )
        if any(not forms for forms in stop_forms):
            raise UnsupportedQuery("every query position needs a stop form")
        keys = sorted({self.key_for(combo) for combo in itertools.product(*stop_forms)})
        docs, pos = [], []
        for raw in keys:
            if stats is not None:
                stats.keys_probed += 1
            d = self.keys.get(raw)
            if d is None:
                continue
            a, b = self.segments.read_posting_arrays(d, stats, kind="phrase")
            docs.append(a)
            pos.append(b)
        if not docs:
            empty = np.empty(0, dtype=np.int64)
            return empty, empty
        if len(docs) == 1:
            return docs[0], pos[0]
        packed = np.unique((np.concatenate(docs) << 32) | np.concatenate(pos))
        return packed >> 32, packed & 0xFFFFFFFF

    def lookup_phrase(self, stop_forms: Sequence[Sequence[int]], stats: ReadStats | None = None
                      ) -> Iterator[PhrasePosting]:
        docs, pos = self.lookup_arrays(stop_forms, stats)
        return (PhrasePosting(a, b) for a, b in zip(docs.tolist(), pos.tolist()))

    def entries(self) -> Iterable[tuple[tuple[int, ...], list[PhrasePosting]]]:
        """Every stored ``(rank multiset, postings)``; used by verification."""
        for raw, d in self.keys.items(bytes([NS_STOP_PHRASE])):
            docs, pos = decode_postings(self.segments.read_bytes(d), d.count)
            yield self.codec.decode(raw), [PhrasePosting(a, b) for a, b in zip(docs.tolist(), pos.tolist())]
