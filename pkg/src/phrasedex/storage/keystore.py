"""Ordered byte-key -> stream-descriptor map persisted as ``keys.pxkv``.

Keys are kept in one sorted array; lookups go through a dict, range scans
through bisect.  Namespaces are a one-byte key prefix.
"""

from __future__ import annotations

import bisect
from pathlib import Path
from typing import Iterator

from ..errors import DecodeError, StoreClosed
from .streams import StreamDescriptor
from .varint import read_varint, write_varint

KEYS_FILE = "keys.pxkv"
MAGIC = b"PXKV"
VERSION = 1

NS_STOP_PHRASE = 0x01
NS_PAIR = 0x02
NS_BASELINE = 0x03


class KeyStore:
    def __init__(self):
        self._map: dict[bytes, StreamDescriptor] = {}
        self._sorted: list[bytes] | None = []
        self._closed = False

    def _check(self):
        if self._closed:
            raise StoreClosed("key store is closed")

    def put(self, key: bytes, d: StreamDescriptor) -> None:
        self._check()
        if not key:
            raise ValueError("keys must be non-empty")
        if key not in self._map:
            self._sorted = None
        self._map[key] = d

    def get(self, key: bytes) -> StreamDescriptor | None:
        self._check()
        return self._map.get(key)

    def __len__(self) -> int:
        return len(self._map)

    def __contains__(self, key: bytes) -> bool:
        self._check()
        return key in self._map

    def keys(self) -> list[bytes]:
        self._check()
        if self._sorted is None:
            self._sorted = sorted(self._map)
        return self._sorted

    def items(self, prefix: bytes = b"") -> Iterator[tuple[bytes, StreamDescriptor]]:
        keys = self.keys()
        i = bisect.bisect_left(keys, prefix)
        while i < len(keys) and keys[i].startswith(prefix):
            k = keys[i]
            yield k, self._map[k]
            i += 1

    def close(self) -> None:
        self._closed = True

    def save(self, path) -> None:
        self._check()
        out = bytearray(MAGIC)
        out.append(VERSION)
        out += len(self._map).to_bytes(4, "little")
        for key in self.keys():
            d = self._map[key]
            write_varint(out, len(key))
            out += key
            for v in (d.segment, d.offset, d.byte_len, d.count):
                write_varint(out, v)
        Path(path).write_bytes(bytes(out))

    @classmethod
    def load(cls, path) -> "KeyStore":
        data = Path(path).read_bytes()
        if data[:4] != MAGIC or len(data) < 9:
            raise DecodeError(f"{path}: not a key store")
        if data[4] != VERSION:
            raise DecodeError(f"{path}: unsupported key store version {data[4]}")
        n = int.from_bytes(data[5:9], "little")
        store = cls()
        off = 9
        keys = []
        for _ in range(n):
            klen, off = read_varint(data, off)
            key = data[off:off + klen]
            if len(key) != klen:
                raise DecodeError(f"{path}: truncated key")
            off += klen
            fields = []
            for _ in range(4):
                v, off = read_varint(data, off)
                fields.append(v)
            store._map[key] = StreamDescriptor(*fields)
            keys.append(key)
        if off != len(data):
            raise DecodeError(f"{path}: {len(data) - off} trailing bytes")
        if any(a >= b for a, b in zip(keys, keys[1:])):
            raise DecodeError(f"{path}: keys out of order")
        store._sorted = keys
        return store
