"""Ingestion: one pass over the corpus feeding every index, then finalize."""

from __future__ import annotations

import logging
import shutil
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from .baseline import BaselineIndexBuilder
from .basic_index import DESCRIPTOR_FILE, BasicIndexBuilder, near_stop_neighbors
from .config import IngestConfig
from .expanded_index import DistanceRules, ExpandedIndexBuilder
from .lexicon import LEXICON_FILE, FrequencyClass, Lexicon, build_lexicon, count_basic_forms, parse_lemma_table, tokenize
from .stop_phrase_index import StopKeyCodec, StopPhraseIndexBuilder
from .storage.docstore import DOCSTORE_FILE, write_docstore
from .storage.header import HEADER_FILE, IndexHeader
from .storage.keystore import KEYS_FILE, KeyStore
from .storage.streams import SegmentWriter
from .index import MANIFEST_FILE

logger = logging.getLogger(__name__)


@dataclass
class DocumentEntry:
    doc: int
    source: str
    tokens: int
    stop_only: int


@dataclass
class CorpusManifest:
    documents: list[DocumentEntry] = field(default_factory=list)
    skipped: list[tuple[str, str]] = field(default_factory=list)
    created: str = ""

    @property
    def total_tokens(self) -> int:
        return sum(d.tokens for d in self.documents)

    @property
    def stop_only_tokens(self) -> int:
        return sum(d.stop_only for d in self.documents)

    def to_text(self) -> str:
        lines = [
            "# phrasedex manifest",
            f"# created\t{self.created}",
            f"# totals\tdocuments={len(self.documents)}\ttokens={self.total_tokens}"
            f"\tstop_only_tokens={self.stop_only_tokens}",
        ]
        lines += [f"# skipped\t{src}\t{reason}" for src, reason in self.skipped]
        lines.append("doc\tsource\ttokens\tstop_only_tokens")
        lines += [f"{d.doc}\t{d.source}\t{d.tokens}\t{d.stop_only}" for d in self.documents]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CorpusManifest":
        m = cls()
        for line in text.splitlines():
            if line.startswith("# created\t"):
                m.created = line.split("\t", 1)[1]
            elif line.startswith("# skipped\t"):
                _, src, reason = line.split("\t", 2)
                m.skipped.append((src, reason))
            elif line and not line.startswith("#") and not line.startswith("doc\t"):
                doc, src, tokens, stop_only = line.split("\t")
                m.documents.append(DocumentEntry(int(doc), src, int(tokens), int(stop_only)))
        return m

    @classmethod
    def load(cls, index_dir) -> "CorpusManifest":
        return cls.from_text((Path(index_dir) / MANIFEST_FILE).read_text(encoding="utf-8"))


def read_corpus(source) -> tuple[list[tuple[str, str]], list[tuple[str, str]]]:
    """Load ``(source, text)`` documents and ``(source, reason)`` skips.

    ``source`` is a directory of plain-text files (one document each, sorted
    by relative path), a line-delimited file (one document per line), or an
    iterable of strings.
    """
    docs: list[tuple[str, str]] = []
    skipped: list[tuple[str, str]] = []
    if isinstance(source, (str, Path)):
        path = Path(source)
        if path.is_dir():
            for f in sorted(p for p in path.rglob("*") if p.is_file()):
                rel = f.relative_to(path).as_posix()
                try:
                    docs.append((rel, f.read_text(encoding="utf-8")))
                except (OSError, UnicodeDecodeError) as exc:
                    logger.warning("skipping unreadable document %s: %s", f, exc)
                    skipped.append((rel, type(exc).__name__))
        else:
            with open(path, encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, 1):
                    docs.append((f"{path.name}:{lineno}", line.rstrip("\n")))
        return docs, skipped
    for i, item in enumerate(source):
        if isinstance(item, tuple):
            docs.append((str(item[0]), item[1]))
        else:
            docs.append((f"doc{i}", item))
    return docs, skipped


def _prepare_output(out: Path) -> None:
    if out.exists():
        if not out.is_dir() or any(out.iterdir()):
            raise FileExistsError(f"output directory {out} must be empty")
    else:
        out.mkdir(parents=True)


def ingest(corpus, out_dir, config: IngestConfig | None = None, lexicon: Lexicon | None = None,
           lemma_table=None, created: str | None = None) -> Path:
    """Build every index for ``corpus`` into the empty directory ``out_dir``.

    Without a ``lexicon`` one is built from the corpus counts and
    ``lemma_table``.  On failure the partially written directory is removed.
    """
    config = config or IngestConfig()
    out = Path(out_dir)
    documents, skipped = read_corpus(corpus)
    token_docs = [tokenize(text) for _, text in documents]
    if lexicon is None:
        table = parse_lemma_table(lemma_table)
        lexicon = build_lexicon(table, count_basic_forms(token_docs, table), config.stop_size, config.frequent_size)
    _prepare_output(out)
    try:
        _build(out, documents, skipped, token_docs, config, lexicon, created)
    except BaseException:
        shutil.rmtree(out, ignore_errors=True)
        raise
    return out


def _build(out: Path, documents, skipped, token_docs, config: IngestConfig, lexicon: Lexicon, created) -> None:
    rules = DistanceRules(lexicon, config)
    basic = BasicIndexBuilder(config.rare_doc_threshold)
    expanded = ExpandedIndexBuilder(rules)
    stops = StopPhraseIndexBuilder(config.min_length, config.max_length, lexicon, config.cartesian_cap)
    baseline = BaselineIndexBuilder() if config.build_baseline else None
    manifest = CorpusManifest(skipped=list(skipped))
    STOP = FrequencyClass.STOP

    for doc, ((source, _), tokens) in enumerate(zip(documents, token_docs)):
        forms = [list(dict.fromkeys(lexicon.analyze(t))) for t in tokens]
        stop_forms = [[f for f in fs if lexicon.classify(f) is STOP] for fs in forms]
        stop_ranks = [[lexicon.stop_rank(f) for f in sf] for sf in stop_forms]
        window = []
        stop_only = 0
        for pos, fs in enumerate(forms):
            if stop_forms[pos]:
                stops.push(doc, pos, stop_forms[pos])
            else:
                stops.flush()
            nonstop = [f for f in fs if lexicon.classify(f) is not STOP]
            if not nonstop:
                stop_only += 1
            for f in nonstop:
                basic.add(f, doc, pos, near_stop_neighbors(stop_ranks, pos, rules.max_distance(f)))
                window.append((pos, f))
            if baseline is not None:
                for f in fs:
                    baseline.add(f, doc, pos)
        stops.flush()
        expanded.add_document(doc, window)
        manifest.documents.append(DocumentEntry(doc, source, len(tokens), stop_only))

    keys = KeyStore()
    huffman = stops.huffman_table() if config.key_codec == "huffman" else None
    with SegmentWriter(out, config.segment_cap) as writer:
        (out / DESCRIPTOR_FILE).write_bytes(basic.write(writer, len(lexicon)))
        expanded.write(writer, keys)
        stops.write(writer, keys, StopKeyCodec(huffman))
        if baseline is not None:
            baseline.write(writer, keys)
    keys.save(out / KEYS_FILE)
    IndexHeader(config, len(documents), huffman.lengths if huffman else []).save(out / HEADER_FILE)
    lexicon.save(out / LEXICON_FILE)
    write_docstore(out / DOCSTORE_FILE, token_docs)
    manifest.created = created or datetime.now(timezone.utc).isoformat(timespec="seconds")
    (out / MANIFEST_FILE).write_text(manifest.to_text(), encoding="utf-8")
    logger.info("indexed %d documents, %d tokens into %s", len(documents), manifest.total_tokens, out)


def verify(index_dir, corpus, **kwargs):
    """Run the full invariant suite; see :func:`phrasedex.verify.verify_index`."""
    from .verify import verify_index

    return verify_index(index_dir, corpus, **kwargs)
