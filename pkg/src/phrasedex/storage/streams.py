"""Append-only segment files holding encoded posting streams."""

from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from ..errors import DecodeError, StoreClosed
from .varint import decode_postings, encode_postings

DEFAULT_SEGMENT_CAP = 1 << 30
SEGMENT_DIR = "segments"


class Posting(NamedTuple):
    doc: int
    pos: int


@dataclass(frozen=True)
class StreamDescriptor:
    segment: int
    offset: int
    byte_len: int
    count: int

    @property
    def empty(self) -> bool:
        return self.count == 0


EMPTY_DESCRIPTOR = StreamDescriptor(0, 0, 0, 0)


@dataclass
class ReadStats:
    """Per-query access counters.

    ``postings_read`` counts every record materialised from any stream;
    ``by_kind`` splits the same total by stream kind.
    """

    postings_read: int = 0
    keys_probed: int = 0
    bytes_read: int = 0
    by_kind: Counter = field(default_factory=Counter)

    def add(self, kind: str, records: int) -> None:
        self.postings_read += records
        self.by_kind[kind] += records

    def reset(self) -> None:
        self.postings_read = 0
        self.keys_probed = 0
        self.bytes_read = 0
        self.by_kind = Counter()

    def merge(self, other: "ReadStats") -> None:
        self.postings_read += other.postings_read
        self.keys_probed += other.keys_probed
        self.bytes_read += other.bytes_read
        self.by_kind.update(other.by_kind)


def _segment_path(directory: Path, number: int) -> Path:
    return directory / SEGMENT_DIR / f"{number:03d}.seg"


class SegmentWriter:
    """Single-writer appender; a stream never straddles two segment files."""

    def __init__(self, directory, cap: int = DEFAULT_SEGMENT_CAP):
        self.directory = Path(directory)
        (self.directory / SEGMENT_DIR).mkdir(parents=True, exist_ok=True)
        self.cap = cap
        self.segment = 0
        self._size = 0
        self._fh = open(_segment_path(self.directory, 0), "wb")

    def append_bytes(self, payload: bytes, count: int) -> StreamDescriptor:
        if self._fh is None:
            raise StoreClosed("segment writer is closed")
        if count == 0:
            return EMPTY_DESCRIPTOR
        if self._size and self._size + len(payload) > self.cap:
            self._fh.close()
            self.segment += 1
            self._size = 0
            self._fh = open(_segment_path(self.directory, self.segment), "wb")
        d = StreamDescriptor(self.segment, self._size, len(payload), count)
        self._fh.write(payload)
        self._size += len(payload)
        return d

    def append_stream(self, postings: Sequence[tuple[int, int]]) -> StreamDescriptor:
        return self.append_bytes(encode_postings(postings), len(postings))

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class SegmentReader:
    """Positional reads against segment files; safe for concurrent use."""

    def __init__(self, directory):
        self.directory = Path(directory)
        self._fds: dict[int, int] = {}
        self._closed = False

    def _fd(self, segment: int) -> int:
        if self._closed:
            raise StoreClosed("segment reader is closed")
        fd = self._fds.get(segment)
        if fd is None:
            path = _segment_path(self.directory, segment)
            try:
                fd = os.open(path, os.O_RDONLY)
            except OSError as exc:
                raise DecodeError(f"cannot open segment {path}: {exc}") from exc
            fd = self._fds.setdefault(segment, fd)
        return fd

    def read_bytes(self, d: StreamDescriptor, stats: ReadStats | None = None,
                   offset: int = 0, length: int | None = None) -> bytes:
        """Read ``length`` bytes starting ``offset`` bytes into the stream."""
        if length is None:
            length = d.byte_len - offset
        if length == 0:
            return b""
        data = os.pread(self._fd(d.segment), length, d.offset + offset)
        if len(data) != length:
            raise DecodeError(
                f"stream {d} truncated: wanted {length} bytes at +{offset}, got {len(data)}"
            )
        if stats is not None:
            stats.bytes_read += length
        return data

    def read_posting_arrays(self, d: StreamDescriptor, stats: ReadStats | None = None,
                            kind: str = "postings") -> tuple[np.ndarray, np.ndarray]:
        data = self.read_bytes(d, stats)
        try:
            docs, pos = decode_postings(data, d.count)
        except DecodeError as exc:
            raise DecodeError(f"stream {d}: {exc}") from exc
        if stats is not None:
            stats.add(kind, d.count)
        return docs, pos

    def read_stream(self, d: StreamDescriptor, stats: ReadStats | None = None) -> Iterator[Posting]:
        docs, pos = self.read_posting_arrays(d, stats)
        return (Posting(a, b) for a, b in zip(docs.tolist(), pos.tolist()))

    def close(self) -> None:
        for fd in self._fds.values():
            os.close(fd)
        self._fds.clear()
        self._closed = True


def segment_files(directory) -> list[Path]:
    return sorted((Path(directory) / SEGMENT_DIR).glob("*.seg"))
