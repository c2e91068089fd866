"""``header.pxhd``: build parameters plus the stop-key Huffman table."""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

from ..config import KEY_CODECS, IngestConfig
from ..errors import DecodeError

HEADER_FILE = "header.pxhd"
MAGIC = b"PXHD"
VERSION = 1

# min, max, md_frequent, md_ordinary, pd_top, pd_rest, ordinary_distance,
# top_tier_fraction, rare_doc_threshold, cartesian_cap, key_codec,
# build_baseline, segment_cap, stop_size, frequent_size, n_docs
_PARAMS = struct.Struct("<7BdIIBBQIII")


@dataclass
class IndexHeader:
    config: IngestConfig
    n_docs: int = 0
    huffman_lengths: list[int] = field(default_factory=list)

    def to_bytes(self) -> bytes:
        c = self.config
        if any(l > 255 for l in self.huffman_lengths):
            raise ValueError("Huffman code length does not fit in a byte")
        out = bytearray(MAGIC)
        out.append(VERSION)
        out += _PARAMS.pack(
            c.min_length, c.max_length, c.max_distance_frequent, c.max_distance_ordinary,
            c.processing_distance_top, c.processing_distance_rest, c.ordinary_distance,
            c.top_tier_fraction, c.rare_doc_threshold, c.cartesian_cap,
            KEY_CODECS.index(c.key_codec), int(c.build_baseline), c.segment_cap,
            c.stop_size, c.frequent_size, self.n_docs,
        )
        out += struct.pack("<I", len(self.huffman_lengths))
        out += bytes(self.huffman_lengths)
        return bytes(out)

    @classmethod
    def from_bytes(cls, data: bytes) -> "IndexHeader":
        if data[:4] != MAGIC or len(data) < 5 + _PARAMS.size + 4:
            raise DecodeError("not an index header")
        if data[4] != VERSION:
            raise DecodeError(f"unsupported header version {data[4]}")
        v = _PARAMS.unpack_from(data, 5)
        config = IngestConfig(
            min_length=v[0], max_length=v[1], max_distance_frequent=v[2], max_distance_ordinary=v[3],
            processing_distance_top=v[4], processing_distance_rest=v[5], ordinary_distance=v[6],
            top_tier_fraction=v[7], rare_doc_threshold=v[8], cartesian_cap=v[9],
            key_codec=KEY_CODECS[v[10]], build_baseline=bool(v[11]), segment_cap=v[12],
            stop_size=v[13], frequent_size=v[14],
        )
        off = 5 + _PARAMS.size
        (n,) = struct.unpack_from("<I", data, off)
        off += 4
        lengths = list(data[off:off + n])
        if len(lengths) != n or off + n != len(data):
            raise DecodeError("header Huffman table has the wrong length")
        return cls(config, v[15], lengths)

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path) -> "IndexHeader":
        return cls.from_bytes(Path(path).read_bytes())
