"""Read-only view of a built index directory."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

from .basic_index import DESCRIPTOR_FILE, BasicIndex, parse_descriptor_table
from .baseline import BaselineIndex
from .errors import DecodeError
from .expanded_index import DistanceRules, ExpandedIndex
from .lexicon import LEXICON_FILE, Lexicon
from .stop_phrase_index import StopKeyCodec, StopPhraseIndex
from .storage.docstore import DOCSTORE_FILE, DocStore
from .storage.header import HEADER_FILE, IndexHeader
from .storage.huffman import HuffmanTable
from .storage.keystore import KEYS_FILE, NS_BASELINE, NS_PAIR, NS_STOP_PHRASE, KeyStore
from .storage.streams import SegmentReader, segment_files

MANIFEST_FILE = "manifest.tsv"


class Index:
    def __init__(self, path):
        self.path = Path(path)
        if not (self.path / HEADER_FILE).is_file():
            raise FileNotFoundError(f"{self.path} is not an index directory (no {HEADER_FILE})")
        self.header = IndexHeader.load(self.path / HEADER_FILE)
        self.config = self.header.config
        self.lexicon = Lexicon.load(self.path / LEXICON_FILE)
        self.keys = KeyStore.load(self.path / KEYS_FILE)
        self.segments = SegmentReader(self.path)
        self.rules = DistanceRules(self.lexicon, self.config)
        table = parse_descriptor_table((self.path / DESCRIPTOR_FILE).read_bytes())
        if len(table) > len(self.lexicon):
            raise DecodeError("descriptor table lists more forms than the lexicon")
        self.basic = BasicIndex(table, self.segments, self.lexicon)
        self.expanded = ExpandedIndex(self.keys, self.segments, self.rules)
        huffman = None
        if self.config.key_codec == "huffman":
            huffman = HuffmanTable(self.header.huffman_lengths)
        self.stop_codec = StopKeyCodec(huffman)
        self.stop_phrases = StopPhraseIndex(self.keys, self.segments, self.lexicon, self.stop_codec,
                                            self.config.min_length, self.config.max_length)
        self.baseline = BaselineIndex(self.keys, self.segments, self.lexicon) if self.config.build_baseline else None
        self.documents = DocStore(self.path / DOCSTORE_FILE)

    @property
    def n_docs(self) -> int:
        return self.header.n_docs

    def component_sizes(self) -> dict[str, dict[str, int]]:
        """Stream bytes, record counts and key counts per index component."""
        sizes = {name: defaultdict(int) for name in ("stop_phrase", "expanded", "basic", "baseline")}
        names = {NS_STOP_PHRASE: "stop_phrase", NS_PAIR: "expanded", NS_BASELINE: "baseline"}
        for raw, d in self.keys.items():
            s = sizes[names[raw[0]]]
            s["keys"] += 1
            s["key_bytes"] += len(raw)
            s["stream_bytes"] += d.byte_len
            s["records"] += d.count
        b = sizes["basic"]
        for ws in self.basic.table:
            if ws is None:
                continue
            b["keys"] += 1
            for d in (ws.s1, ws.s2, ws.s3):
                if d is not None:
                    b["stream_bytes"] += d.byte_len
                    b["records"] += d.count
        b["key_bytes"] = (self.path / DESCRIPTOR_FILE).stat().st_size
        total = sum(p.stat().st_size for p in self.path.rglob("*") if p.is_file())
        out = {k: dict(v) for k, v in sizes.items()}
        out["total"] = {"file_bytes": total, "segments": len(segment_files(self.path))}
        return out

    def close(self) -> None:
        self.segments.close()
        self.keys.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def open_index(path) -> Index:
    return Index(path)
