"""Canonical Huffman coding of stop-index sequences.

The alphabet is ``0 .. S-1`` (stop-list indices) plus one end marker with
symbol value ``S``.  Only code lengths are persisted; codes are re-derived
canonically (by length, then by symbol).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..errors import DecodeError, UnknownSymbol


def code_lengths(weights: Sequence[int]) -> list[int]:
    """Huffman code length for every symbol; zero weights are bumped to 1."""
    n = len(weights)
    if n == 0:
        return []
    if n == 1:
        return [1]
    # (weight, tiebreak, symbols-in-subtree)
    heap = [(max(int(w), 1), i, [i]) for i, w in enumerate(weights)]
    heapq.heapify(heap)
    lengths = [0] * n
    tiebreak = n
    while len(heap) > 1:
        w1, _, s1 = heapq.heappop(heap)
        w2, _, s2 = heapq.heappop(heap)
        for s in s1:
            lengths[s] += 1
        for s in s2:
            lengths[s] += 1
        heapq.heappush(heap, (w1 + w2, tiebreak, s1 + s2))
        tiebreak += 1
    return lengths


def canonical_codes(lengths: Sequence[int]) -> list[int]:
    order = sorted(range(len(lengths)), key=lambda s: (lengths[s], s))
    codes = [0] * len(lengths)
    code = 0
    prev_len = 0
    for rank, sym in enumerate(order):
        length = lengths[sym]
        if rank:
            code += 1
        code <<= length - prev_len
        codes[sym] = code
        prev_len = length
    return codes


@dataclass
class HuffmanTable:
    """Canonical prefix code over stop indices plus an end marker."""

    lengths: list[int]
    codes: list[int] = field(init=False, repr=False)
    _decode: dict[tuple[int, int], int] = field(init=False, repr=False)

    def __post_init__(self):
        if not self.lengths:
            raise ValueError("a Huffman table needs at least the end marker")
        self.codes = canonical_codes(self.lengths)
        self._decode = {(l, c): s for s, (l, c) in enumerate(zip(self.lengths, self.codes))}

    @classmethod
    def from_weights(cls, stop_weights: Sequence[int], end_weight: int = 1) -> "HuffmanTable":
        return cls(code_lengths(list(stop_weights) + [end_weight]))

    @classmethod
    def from_counts(cls, counts: Mapping[int, int], size: int, end_weight: int | None = None) -> "HuffmanTable":
        weights = [counts.get(i, 0) + 1 for i in range(size)]
        if end_weight is None:
            end_weight = max(1, sum(weights) // 3)
        return cls.from_weights(weights, end_weight)

    @property
    def end_marker(self) -> int:
        return len(self.lengths) - 1

    @property
    def alphabet_size(self) -> int:
        """Number of stop indices (the end marker excluded)."""
        return len(self.lengths) - 1

    def encode(self, symbols: Sequence[int]) -> bytes:
        acc = 0
        nbits = 0
        end = self.end_marker
        for s in symbols:
            if not 0 <= s < end:
                raise UnknownSymbol(f"stop index {s} outside alphabet of size {end}")
            length = self.lengths[s]
            acc = (acc << length) | self.codes[s]
            nbits += length
        length = self.lengths[end]
        acc = (acc << length) | self.codes[end]
        nbits += length
        pad = -nbits % 8
        return (acc << pad).to_bytes((nbits + pad) // 8, "big")

    def decode(self, data: bytes) -> list[int]:
        value = int.from_bytes(data, "big")
        total = len(data) * 8
        out = []
        code = 0
        length = 0
        max_len = max(self.lengths)
        for i in range(total - 1, -1, -1):
            code = (code << 1) | ((value >> i) & 1)
            length += 1
            sym = self._decode.get((length, code))
            if sym is not None:
                if sym == self.end_marker:
                    return out
                out.append(sym)
                code = 0
                length = 0
            elif length > max_len:
                break
        raise DecodeError("Huffman stream has no end marker")
