"""Surface tokens -> basic forms, and the stop / frequent / ordinary split.

The lemma table is plain text, one ``surface<TAB>lemma1,lemma2,...`` line
per surface form.  Words missing from the table are their own basic form.
"""

from __future__ import annotations

import logging
import re
import threading
from collections import Counter
from enum import IntEnum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import DecodeError, InvalidToken, ParseError, UnknownForm
from .storage.varint import read_varint, write_varint

logger = logging.getLogger(__name__)

LEXICON_FILE = "lexicon.pxlx"
MAGIC = b"PXLX"
VERSION = 1

DEFAULT_STOP_SIZE = 700
DEFAULT_FREQUENT_SIZE = 2100

_TOKEN_RE = re.compile(r"[^\W_]+")


class FrequencyClass(IntEnum):
    STOP = 0
    FREQUENT = 1
    ORDINARY = 2


def fold(token: str) -> str:
    return token.casefold()


def tokenize(text: str) -> list[str]:
    """Split on anything that is not a letter or digit, case-folded."""
    return _TOKEN_RE.findall(text.casefold())


def parse_lemma_table(source) -> dict[str, tuple[str, ...]]:
    """Read a lemma table from a path, an iterable of lines or a mapping."""
    if source is None:
        return {}
    if isinstance(source, Mapping):
        return {fold(k): tuple(dict.fromkeys(fold(l) for l in v)) for k, v in source.items()}
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            return parse_lemma_table(fh.read().splitlines())
    table: dict[str, tuple[str, ...]] = {}
    for lineno, raw in enumerate(source, 1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        surface, sep, rest = line.partition("\t")
        lemmas = [fold(l.strip()) for l in rest.split(",")]
        if not sep or not surface.strip() or not all(lemmas):
            raise ParseError(f"line {lineno}: expected 'surface<TAB>lemma[,lemma...]', got {line!r}")
        table[fold(surface.strip())] = tuple(dict.fromkeys(lemmas))
    return table


def _lemmas(token: str, table: Mapping[str, Sequence[str]]) -> Sequence[str]:
    return table.get(token) or (token,)


def count_basic_forms(documents: Iterable[Sequence[str]], lemma_table: Mapping[str, Sequence[str]]) -> Counter:
    """Corpus occurrence count per basic-form string (one per token per form)."""
    counts: Counter = Counter()
    for tokens in documents:
        for tok in tokens:
            counts.update(_lemmas(tok, lemma_table))
    return counts


class Lexicon:
    """Interned basic forms with their frequency classes.

    Form IDs are dense.  Query-time words that were never seen are interned
    on demand as zero-count ordinary forms.
    """

    def __init__(self, surfaces: Sequence[str], counts: Sequence[int], classes: Sequence[FrequencyClass],
                 stop_forms: Sequence[int], frequent_forms: Sequence[int],
                 table: Mapping[str, Sequence[int]]):
        self._surfaces = list(surfaces)
        self._ids = {s: i for i, s in enumerate(self._surfaces)}
        self._counts = list(counts)
        self._classes = [FrequencyClass(c) for c in classes]
        self.stop_forms = tuple(stop_forms)
        self.frequent_forms = tuple(frequent_forms)
        self._stop_rank = {f: r for r, f in enumerate(self.stop_forms)}
        self._frequent_rank = {f: r for r, f in enumerate(self.frequent_forms)}
        self._table = {k: tuple(v) for k, v in table.items()}
        ranked = sorted((i for i, c in enumerate(self._counts) if c > 0),
                        key=lambda i: (-self._counts[i], self._surfaces[i]))
        self._rank = {f: r for r, f in enumerate(ranked)}
        self._n_ranked = len(ranked)
        self._lock = threading.Lock()

    # -- lookups --------------------------------------------------------------

    @property
    def words_count(self) -> int:
        return len(self._surfaces)

    def __len__(self) -> int:
        return len(self._surfaces)

    def _require(self, form: int) -> None:
        if not 0 <= form < len(self._surfaces):
            raise UnknownForm(form)

    def surface(self, form: int) -> str:
        self._require(form)
        return self._surfaces[form]

    def form_id(self, surface: str) -> int | None:
        return self._ids.get(fold(surface))

    def count(self, form: int) -> int:
        self._require(form)
        return self._counts[form]

    def classify(self, form: int) -> FrequencyClass:
        self._require(form)
        return self._classes[form]

    def stop_rank(self, form: int) -> int | None:
        return self._stop_rank.get(form)

    def frequent_rank(self, form: int) -> int | None:
        return self._frequent_rank.get(form)

    def frequency_rank(self, form: int) -> int:
        """Global rank by descending count; unseen forms sort after all others."""
        r = self._rank.get(form)
        return r if r is not None else self._n_ranked + form

    @property
    def stop_size(self) -> int:
        return len(self.stop_forms)

    @property
    def frequent_size(self) -> int:
        return len(self.frequent_forms)

    def analyze(self, token: str) -> list[int]:
        folded = fold(token).strip()
        if not folded:
            raise InvalidToken(f"empty token {token!r}")
        forms = self._table.get(folded)
        if forms:
            return list(forms)
        form = self._ids.get(folded)
        if form is None:
            form = self._intern(folded)
        return [form]

    def _intern(self, surface: str) -> int:
        with self._lock:
            form = self._ids.get(surface)
            if form is None:
                form = len(self._surfaces)
                self._surfaces.append(surface)
                self._counts.append(0)
                self._classes.append(FrequencyClass.ORDINARY)
                self._ids[surface] = form
        return form

    def stop_forms_of(self, forms: Iterable[int]) -> list[int]:
        return [f for f in forms if self._classes[f] is FrequencyClass.STOP]

    # -- persistence ----------------------------------------------------------

    def to_bytes(self, n_forms: int | None = None) -> bytes:
        n = len(self._surfaces) if n_forms is None else n_forms
        out = bytearray(MAGIC)
        out.append(VERSION)
        write_varint(out, n)
        for i in range(n):
            raw = self._surfaces[i].encode("utf-8")
            write_varint(out, len(raw))
            out += raw
            write_varint(out, self._counts[i])
            out.append(int(self._classes[i]))
        for ranks in (self.stop_forms, self.frequent_forms):
            write_varint(out, len(ranks))
            for f in ranks:
                write_varint(out, f)
        write_varint(out, len(self._table))
        for surface in sorted(self._table):
            raw = surface.encode("utf-8")
            write_varint(out, len(raw))
            out += raw
            forms = self._table[surface]
            write_varint(out, len(forms))
            for f in forms:
                write_varint(out, f)
        return bytes(out)

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def from_bytes(cls, data: bytes) -> "Lexicon":
        if data[:4] != MAGIC or len(data) < 5:
            raise DecodeError("not a lexicon file")
        if data[4] != VERSION:
            raise DecodeError(f"unsupported lexicon version {data[4]}")
        off = 5

        def varint():
            nonlocal off
            v, off = read_varint(data, off)
            return v

        def string():
            nonlocal off
            n = varint()
            raw = data[off:off + n]
            if len(raw) != n:
                raise DecodeError("truncated lexicon string")
            off += n
            return raw.decode("utf-8")

        n = varint()
        surfaces, counts, classes = [], [], []
        for _ in range(n):
            surfaces.append(string())
            counts.append(varint())
            if off >= len(data):
                raise DecodeError("truncated lexicon")
            classes.append(FrequencyClass(data[off]))
            off += 1
        stop_forms = [varint() for _ in range(varint())]
        frequent_forms = [varint() for _ in range(varint())]
        table = {}
        for _ in range(varint()):
            s = string()
            table[s] = tuple(varint() for _ in range(varint()))
        if off != len(data):
            raise DecodeError("trailing bytes in lexicon")
        return cls(surfaces, counts, classes, stop_forms, frequent_forms, table)

    @classmethod
    def load(cls, path) -> "Lexicon":
        return cls.from_bytes(Path(path).read_bytes())


def build_lexicon(lemma_table, corpus_counts: Mapping[str, int],
                  stop_size: int = DEFAULT_STOP_SIZE,
                  frequent_size: int = DEFAULT_FREQUENT_SIZE) -> Lexicon:
    """Rank counted forms; the top ``stop_size`` become stop forms, the next
    ``frequent_size`` frequent, everything else ordinary.

    Equal counts are ordered by surface string so the result does not depend
    on input order.  Sizes larger than the number of counted forms are
    clamped.
    """
    if stop_size < 0 or frequent_size < 0:
        raise ValueError("list sizes must be non-negative")
    table = parse_lemma_table(lemma_table)
    counts = {fold(k): int(v) for k, v in corpus_counts.items()}
    # table keys are surfaces, not basic forms; only lemmas and counted forms are interned
    basic = set(counts)
    for lemmas in table.values():
        basic.update(lemmas)
    surfaces = sorted(basic)
    ids = {s: i for i, s in enumerate(surfaces)}
    ranked = sorted((s for s in surfaces if counts.get(s, 0) > 0), key=lambda s: (-counts[s], s))
    if stop_size + frequent_size > len(ranked):
        logger.warning("stop_size + frequent_size = %d exceeds %d counted forms; clamping",
                       stop_size + frequent_size, len(ranked))
    stop = ranked[:stop_size]
    frequent = ranked[len(stop):len(stop) + frequent_size]
    classes = [FrequencyClass.ORDINARY] * len(surfaces)
    for s in stop:
        classes[ids[s]] = FrequencyClass.STOP
    for s in frequent:
        classes[ids[s]] = FrequencyClass.FREQUENT
    id_table = {surface: tuple(ids[l] for l in lemmas) for surface, lemmas in table.items()}
    return Lexicon(surfaces, [counts.get(s, 0) for s in surfaces], classes,
                   [ids[s] for s in stop], [ids[s] for s in frequent], id_table)
