"""Basic index: every occurrence of frequent and ordinary forms.

Each form owns up to three streams:

* stream 1 -- one ``(doc, first_pos, count)`` record per document,
* stream 2 -- the remaining occurrences as ``(doc, pos)`` postings,
* stream 3 -- near-stop annotations, one per occurrence.

Forms found in fewer than ``rare_doc_threshold`` documents keep all three
sections in a single stream; a small header lets readers stop after
section 1.
"""

from __future__ import annotations

import struct
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .errors import DecodeError, IndexCorrupt, WrongIndex
from .lexicon import FrequencyClass, Lexicon
from .storage.streams import EMPTY_DESCRIPTOR, Posting, ReadStats, SegmentReader, SegmentWriter, StreamDescriptor
from .storage.varint import (
    decode_annotations,
    decode_first_occurrences,
    decode_postings,
    encode_annotations,
    encode_first_occurrences,
    encode_postings,
    read_varint,
    write_varint,
)

DESCRIPTOR_FILE = "basic.pxdt"
MAGIC = b"PXDT"
VERSION = 1

FLAG_PRESENT = 0x01
FLAG_MERGED = 0x02
FLAG_S2 = 0x04
FLAG_S3 = 0x08

_RECORD = struct.Struct("<B" + "IQII" * 3)
_MERGED_HEADER_MAX = 40


class FirstOccurrenceRecord(NamedTuple):
    doc: int
    first_pos: int
    count: int


class NearStopAnnotation(NamedTuple):
    anchor_pos: int
    neighbors: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class WordStreams:
    form: int
    flags: int
    s1: StreamDescriptor
    s2: StreamDescriptor | None
    s3: StreamDescriptor | None

    @property
    def merged(self) -> bool:
        return bool(self.flags & FLAG_MERGED)


def near_stop_neighbors(stop_ranks: Sequence[Sequence[int]], pos: int, max_distance: int) -> tuple[tuple[int, int], ...]:
    """``(offset, stop_index)`` for every stop form within ``max_distance``.

    ``stop_ranks[p]`` lists the stop indices of the token at ``p``.
    """
    lo = max(0, pos - max_distance)
    hi = min(len(stop_ranks), pos + max_distance + 1)
    out = []
    for p in range(lo, hi):
        if p != pos:
            for r in sorted(stop_ranks[p]):
                out.append((p - pos, r))
    return tuple(out)


def _split_occurrences(occ: Sequence[tuple[int, int]]):
    s1, s2 = [], []
    i = 0
    n = len(occ)
    while i < n:
        doc = occ[i][0]
        j = i
        while j < n and occ[j][0] == doc:
            j += 1
        s1.append((doc, occ[i][1], j - i))
        s2.extend(occ[i + 1:j])
        i = j
    return s1, s2


class BasicIndexBuilder:
    def __init__(self, rare_doc_threshold: int = 16):
        self.rare_doc_threshold = rare_doc_threshold
        self._occ: dict[int, list[tuple[int, int]]] = defaultdict(list)
        self._ann: dict[int, list[tuple[tuple[int, int], ...]]] = defaultdict(list)

    def add(self, form: int, doc: int, pos: int, neighbors: tuple[tuple[int, int], ...]) -> None:
        self._occ[form].append((doc, pos))
        self._ann[form].append(neighbors)

    def write(self, writer: SegmentWriter, n_forms: int) -> bytes:
        out = bytearray(MAGIC)
        out.append(VERSION)
        out += n_forms.to_bytes(4, "little")
        for form in range(n_forms):
            occ = self._occ.get(form)
            if not occ:
                out += _RECORD.pack(0, *(_fields(EMPTY_DESCRIPTOR) * 3))
                continue
            s1, s2 = _split_occurrences(occ)
            b1 = encode_first_occurrences(s1)
            b2 = encode_postings(s2)
            b3 = encode_annotations(self._ann[form])
            if len(s1) < self.rare_doc_threshold:
                payload = bytearray()
                for n, b in ((len(s1), b1), (len(s2), b2)):
                    write_varint(payload, n)
                    write_varint(payload, len(b))
                    payload += b
                write_varint(payload, len(occ))
                payload += b3
                d = writer.append_bytes(bytes(payload), len(s1) + len(s2) + len(occ))
                flags = FLAG_PRESENT | FLAG_MERGED
                out += _RECORD.pack(flags, *_fields(d), *(_fields(EMPTY_DESCRIPTOR) * 2))
            else:
                d1 = writer.append_bytes(b1, len(s1))
                d2 = writer.append_bytes(b2, len(s2))
                d3 = writer.append_bytes(b3, len(occ))
                flags = FLAG_PRESENT | FLAG_S3 | (FLAG_S2 if s2 else 0)
                out += _RECORD.pack(flags, *_fields(d1), *_fields(d2), *_fields(d3))
        return bytes(out)


def _fields(d: StreamDescriptor) -> tuple[int, int, int, int]:
    return (d.segment, d.offset, d.byte_len, d.count)


def parse_descriptor_table(data: bytes) -> list[WordStreams | None]:
    if data[:4] != MAGIC or len(data) < 9:
        raise DecodeError("not a basic-index descriptor table")
    if data[4] != VERSION:
        raise DecodeError(f"unsupported descriptor table version {data[4]}")
    n = int.from_bytes(data[5:9], "little")
    if len(data) != 9 + n * _RECORD.size:
        raise DecodeError("descriptor table has the wrong length")
    table: list[WordStreams | None] = []
    for form, rec in enumerate(_RECORD.iter_unpack(data[9:])):
        flags = rec[0]
        if not flags & FLAG_PRESENT:
            table.append(None)
            continue
        d1, d2, d3 = (StreamDescriptor(*rec[1 + 4 * i:5 + 4 * i]) for i in range(3))
        if flags & FLAG_MERGED:
            table.append(WordStreams(form, flags, d1, None, None))
        else:
            table.append(WordStreams(form, flags, d1, d2 if flags & FLAG_S2 else None,
                                     d3 if flags & FLAG_S3 else None))
    return table


class BasicIndex:
    """Read side of the basic index."""

    def __init__(self, table: list[WordStreams | None], segments: SegmentReader, lexicon: Lexicon):
        self.table = table
        self.segments = segments
        self.lexicon = lexicon

    def streams(self, form: int) -> WordStreams | None:
        if self.lexicon.classify(form) is FrequencyClass.STOP:
            raise WrongIndex(f"stop form {self.lexicon.surface(form)!r} is not in the basic index")
        return self.table[form] if form < len(self.table) else None

    # -- merged-layout helpers ------------------------------------------------

    def _merged_sections(self, ws: WordStreams, stats, wanted: tuple[int, ...]) -> list[tuple[int, bytes]]:
        """``(count, bytes)`` for the requested sections of a merged stream."""
        d = ws.s1
        seg = self.segments
        out = []
        off = 0
        for section in range(max(wanted) + 1):
            head = seg.read_bytes(d, stats, off, min(_MERGED_HEADER_MAX, d.byte_len - off))
            n, p = read_varint(head, 0)
            if section < 2:
                blen, p = read_varint(head, p)
            else:
                blen = d.byte_len - off - p
            off += p
            if off + blen > d.byte_len:
                raise DecodeError(f"form {ws.form}: merged section {section} overruns its stream")
            if section in wanted:
                out.append((n, seg.read_bytes(d, stats, off, blen)))
            off += blen
        return out

    def _first_arrays(self, ws: WordStreams, stats):
        if ws.merged:
            (n, data), = self._merged_sections(ws, stats, (0,))
        else:
            n, data = ws.s1.count, self.segments.read_bytes(ws.s1, stats)
        try:
            arrays = decode_first_occurrences(data, n)
        except DecodeError as exc:
            raise DecodeError(f"form {ws.form} stream 1: {exc}") from exc
        if stats is not None:
            stats.add("s1", n)
        return arrays

    # -- public reads ---------------------------------------------------------

    def first_occurrence_arrays(self, form: int, stats: ReadStats | None = None):
        ws = self.streams(form)
        if ws is None:
            empty = np.empty(0, dtype=np.int64)
            return empty, empty, empty
        return self._first_arrays(ws, stats)

    def first_occurrences(self, form: int, stats: ReadStats | None = None) -> Iterator[FirstOccurrenceRecord]:
        docs, first, counts = self.first_occurrence_arrays(form, stats)
        return (FirstOccurrenceRecord(*r) for r in zip(docs.tolist(), first.tolist(), counts.tolist()))

    def occurrence_arrays(self, form: int, stats: ReadStats | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Merged streams 1 and 2 as sorted ``(docs, positions)`` arrays."""
        ws = self.streams(form)
        if ws is None:
            empty = np.empty(0, dtype=np.int64)
            return empty, empty
        if ws.merged:
            (n1, b1), (n2, b2) = self._merged_sections(ws, stats, (0, 1))
        else:
            n1, b1 = ws.s1.count, self.segments.read_bytes(ws.s1, stats)
            n2, b2 = (ws.s2.count, self.segments.read_bytes(ws.s2, stats)) if ws.s2 else (0, b"")
        try:
            d1, p1, counts = decode_first_occurrences(b1, n1)
            d2, p2 = decode_postings(b2, n2)
        except DecodeError as exc:
            raise DecodeError(f"form {form} streams 1/2: {exc}") from exc
        if int(counts.sum()) != n1 + n2:
            raise IndexCorrupt(f"form {form}: stream-1 counts {int(counts.sum())} != {n1 + n2} occurrences")
        if stats is not None:
            stats.add("s1", n1)
            stats.add("s2", n2)
        docs = np.concatenate([d1, d2])
        pos = np.concatenate([p1, p2])
        order = np.lexsort((pos, docs))
        return docs[order], pos[order]

    def all_occurrences(self, form: int, stats: ReadStats | None = None) -> Iterator[Posting]:
        docs, pos = self.occurrence_arrays(form, stats)
        return (Posting(a, b) for a, b in zip(docs.tolist(), pos.tolist()))

    def annotations(self, form: int, stats: ReadStats | None = None) -> list[tuple[tuple[int, int], ...]]:
        ws = self.streams(form)
        if ws is None:
            return []
        if ws.merged:
            n, data = self._merged_sections(ws, stats, (2,))[0]
        elif ws.s3 is not None:
            n, data = ws.s3.count, self.segments.read_bytes(ws.s3, stats)
        else:
            return []
        try:
            ann = decode_annotations(data, n)
        except DecodeError as exc:
            raise DecodeError(f"form {form} stream 3: {exc}") from exc
        if stats is not None:
            stats.add("s3", n)
        return ann

    def occurrences_with_stops(self, form: int, stats: ReadStats | None = None
                               ) -> Iterator[tuple[Posting, NearStopAnnotation]]:
        docs, pos = self.occurrence_arrays(form, stats)
        ann = self.annotations(form, stats)
        if len(ann) != docs.size:
            raise IndexCorrupt(f"form {form}: {len(ann)} annotations for {docs.size} occurrences")
        return ((Posting(d, p), NearStopAnnotation(p, a))
                for d, p, a in zip(docs.tolist(), pos.tolist(), ann))
