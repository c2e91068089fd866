"""7-bit little-endian variable-length integers, zig-zag mapping and the
delta layouts used by every posting stream.

Decoding is vectorised with numpy because full-stream reads of frequent
words dominate query cost; encoding stays in plain Python.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from ..errors import DecodeError, OrderViolation

MAX_VARINT_BYTES = 10


def zigzag(value: int) -> int:
    return (value << 1) if value >= 0 else ((-value) << 1) - 1


def unzigzag(value: int) -> int:
    return (value >> 1) if not value & 1 else -((value + 1) >> 1)


def write_varint(out: bytearray, value: int) -> None:
    if value < 0:
        raise ValueError(f"varint cannot encode negative value {value}")
    while value >= 0x80:
        out.append((value & 0x7F) | 0x80)
        value >>= 7
    out.append(value)


def encode_varints(values: Iterable[int]) -> bytes:
    out = bytearray()
    for v in values:
        write_varint(out, v)
    return bytes(out)


def read_varint(buf: bytes, offset: int) -> tuple[int, int]:
    """Decode one varint at ``offset``; return ``(value, next_offset)``."""
    result = 0
    shift = 0
    n = len(buf)
    while True:
        if offset >= n:
            raise DecodeError("truncated varint")
        b = buf[offset]
        offset += 1
        result |= (b & 0x7F) << shift
        if b < 0x80:
            return result, offset
        shift += 7
        if shift >= 7 * MAX_VARINT_BYTES:
            raise DecodeError("varint longer than 10 bytes")


def decode_varints(buf: bytes) -> np.ndarray:
    """Decode a whole buffer of concatenated varints into an int64 array."""
    arr = np.frombuffer(buf, dtype=np.uint8)
    if arr.size == 0:
        return np.empty(0, dtype=np.int64)
    if arr[-1] & 0x80:
        raise DecodeError("buffer ends inside a varint")
    ends = np.flatnonzero(arr < 0x80)
    starts = np.empty_like(ends)
    starts[0] = 0
    starts[1:] = ends[:-1] + 1
    lengths = ends - starts + 1
    if int(lengths.max()) > MAX_VARINT_BYTES:
        raise DecodeError("varint longer than 10 bytes")
    group = np.repeat(np.arange(ends.size), lengths)
    shifts = ((np.arange(arr.size) - starts[group]) * 7).astype(np.uint64)
    parts = (arr & 0x7F).astype(np.uint64) << shifts
    return np.add.reduceat(parts, starts).astype(np.int64)


def _unzigzag_array(values: np.ndarray) -> np.ndarray:
    return np.where(values & 1, -((values + 1) >> 1), values >> 1)


def _doc_relative(docgaps: np.ndarray, posfield: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Undo the doc-gap / per-document position-gap layout.

    Returns ``(docs, positions, new_doc_mask)``.
    """
    n = docgaps.size
    docs = np.cumsum(docgaps)
    new = np.ones(n, dtype=bool)
    new[1:] = docgaps[1:] != 0
    cs = np.cumsum(posfield)
    starts = np.flatnonzero(new)
    seg = np.cumsum(new) - 1
    base = cs[starts] - posfield[starts]
    return docs, cs - base[seg], new


# -- (doc, pos) posting streams ------------------------------------------------

def encode_postings(postings: Sequence[tuple[int, int]]) -> bytes:
    out = bytearray()
    prev_doc = -1
    prev_pos = -1
    for doc, pos in postings:
        if doc < prev_doc or (doc == prev_doc and pos <= prev_pos) or pos < 0:
            raise OrderViolation(
                f"posting ({doc}, {pos}) does not follow ({prev_doc}, {prev_pos})"
            )
        if doc != prev_doc:
            write_varint(out, doc - prev_doc if prev_doc >= 0 else doc)
            write_varint(out, pos)
        else:
            write_varint(out, 0)
            write_varint(out, pos - prev_pos)
        prev_doc, prev_pos = doc, pos
    return bytes(out)


def decode_postings(buf: bytes, count: int) -> tuple[np.ndarray, np.ndarray]:
    v = decode_varints(buf)
    if v.size != 2 * count:
        raise DecodeError(f"expected {count} postings, found {v.size / 2:g}")
    if count == 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty
    docgaps, posfield = v[0::2], v[1::2]
    docs, pos, new = _doc_relative(docgaps, posfield)
    if np.any(posfield[~new] == 0):
        raise DecodeError("repeated position inside a document")
    return docs, pos


# -- first-occurrence records (doc, first_pos, count) ------------------------

def encode_first_occurrences(records: Sequence[tuple[int, int, int]]) -> bytes:
    out = bytearray()
    prev_doc = -1
    for doc, first, cnt in records:
        if doc <= prev_doc:
            raise OrderViolation(f"document {doc} does not follow {prev_doc}")
        if cnt < 1:
            raise ValueError("occurrence count must be positive")
        write_varint(out, doc - prev_doc - 1 if prev_doc >= 0 else doc)
        write_varint(out, first)
        write_varint(out, cnt)
        prev_doc = doc
    return bytes(out)


def decode_first_occurrences(buf: bytes, count: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    v = decode_varints(buf)
    if v.size != 3 * count:
        raise DecodeError(f"expected {count} first-occurrence records, found {v.size / 3:g}")
    gaps = v[0::3].copy()
    gaps[1:] += 1
    counts = v[2::3]
    if count and int(counts.min()) < 1:
        raise DecodeError("zero occurrence count")
    return np.cumsum(gaps), v[1::3], counts


# -- expanded-pair postings (doc, pos_w, dist) --------------------------------

def encode_pair_postings(postings: Sequence[tuple[int, int, int]]) -> bytes:
    out = bytearray()
    prev = (-1, -1, 0)
    for doc, pos, dist in postings:
        cur = (doc, pos, dist)
        if dist == 0 or (prev[0] >= 0 and cur <= prev):
            raise OrderViolation(f"pair posting {cur} does not follow {prev}")
        if doc != prev[0]:
            write_varint(out, doc - prev[0] if prev[0] >= 0 else doc)
            write_varint(out, pos)
        else:
            write_varint(out, 0)
            write_varint(out, pos - prev[1])
        write_varint(out, zigzag(dist))
        prev = cur
    return bytes(out)


def decode_pair_postings(buf: bytes, count: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    v = decode_varints(buf)
    if v.size != 3 * count:
        raise DecodeError(f"expected {count} pair postings, found {v.size / 3:g}")
    if count == 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty, empty
    docs, pos, _ = _doc_relative(v[0::3], v[1::3])
    dist = _unzigzag_array(v[2::3])
    if np.any(dist == 0):
        raise DecodeError("zero pair distance")
    return docs, pos, dist


# -- near-stop annotations ----------------------------------------------------

def encode_annotations(annotations: Sequence[Sequence[tuple[int, int]]]) -> bytes:
    """Each annotation is a list of ``(offset, stop_index)`` sorted by offset."""
    out = bytearray()
    for neighbors in annotations:
        write_varint(out, len(neighbors))
        prev = 0
        for off, stop in neighbors:
            write_varint(out, zigzag(off - prev))
            write_varint(out, stop)
            prev = off
    return bytes(out)


def decode_annotations(buf: bytes, count: int) -> list[tuple[tuple[int, int], ...]]:
    values = decode_varints(buf).tolist()
    out = []
    i = 0
    n = len(values)
    try:
        for _ in range(count):
            k = values[i]
            i += 1
            prev = 0
            neighbors = []
            for _ in range(k):
                prev += unzigzag(values[i])
                neighbors.append((prev, values[i + 1]))
                i += 2
            out.append(tuple(neighbors))
    except IndexError:
        raise DecodeError("annotation stream ends early") from None
    if i != n:
        raise DecodeError(f"{n - i} trailing values after {count} annotations")
    return out
