"""Compressed token text of every document (``documents.pxds``).

Benchmarks draw their queries from stored documents, and the exact-order
filter for stop phrases re-reads the tokens it needs from here.
"""

from __future__ import annotations

import struct
import zlib
from pathlib import Path
from typing import Iterable, Sequence

from ..errors import DecodeError

DOCSTORE_FILE = "documents.pxds"
MAGIC = b"PXDS"
VERSION = 1


def write_docstore(path, documents: Iterable[Sequence[str]]) -> None:
    blobs = [zlib.compress(" ".join(tokens).encode("utf-8"), 6) for tokens in documents]
    out = bytearray(MAGIC)
    out.append(VERSION)
    out += struct.pack("<I", len(blobs))
    offset = 0
    for b in blobs:
        out += struct.pack("<QI", offset, len(b))
        offset += len(b)
    for b in blobs:
        out += b
    Path(path).write_bytes(bytes(out))


class DocStore:
    def __init__(self, path):
        self.path = Path(path)
        self._data = self.path.read_bytes() if self.path.exists() else None
        self._cache: dict[int, list[str]] = {}
        if self._data is None:
            self._n = 0
            return
        if self._data[:4] != MAGIC or self._data[4] != VERSION:
            raise DecodeError(f"{path}: not a document store")
        (self._n,) = struct.unpack_from("<I", self._data, 5)
        self._base = 9 + 12 * self._n

    def __len__(self) -> int:
        return self._n

    def tokens(self, doc: int) -> list[str]:
        cached = self._cache.get(doc)
        if cached is not None:
            return cached
        if not 0 <= doc < self._n:
            raise IndexError(doc)
        off, n = struct.unpack_from("<QI", self._data, 9 + 12 * doc)
        blob = self._data[self._base + off:self._base + off + n]
        try:
            text = zlib.decompress(blob).decode("utf-8")
        except (zlib.error, UnicodeDecodeError) as exc:
            raise DecodeError(f"document {doc}: {exc}") from exc
        tokens = text.split(" ") if text else []
        if len(self._cache) < 4096:
            self._cache[doc] = tokens
        return tokens
