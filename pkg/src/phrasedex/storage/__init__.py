"""Persistent substrate: segment streams, the ordered key store and codecs."""

from .huffman import HuffmanTable
from .keystore import NS_BASELINE, NS_PAIR, NS_STOP_PHRASE, KeyStore
from .streams import (
    DEFAULT_SEGMENT_CAP,
    EMPTY_DESCRIPTOR,
    Posting,
    ReadStats,
    SegmentReader,
    SegmentWriter,
    StreamDescriptor,
)

__all__ = [
    "DEFAULT_SEGMENT_CAP",
    "EMPTY_DESCRIPTOR",
    "HuffmanTable",
    "KeyStore",
    "NS_BASELINE",
    "NS_PAIR",
    "NS_STOP_PHRASE",
    "Posting",
    "ReadStats",
    "SegmentReader",
    "SegmentWriter",
    "StreamDescriptor",
]
