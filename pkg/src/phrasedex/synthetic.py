"""Seeded Zipfian corpora with a small ambiguous lemma table."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .config import IngestConfig

_ONSETS = ("b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "st", "tr", "kl")
_VOWELS = ("a", "e", "i", "o", "u", "ai", "ou")


def pseudo_words(n: int) -> list[str]:
    """``n`` distinct lowercase pseudo-words, shortest first."""
    syllables = [o + v for o, v in itertools.product(_ONSETS, _VOWELS)]
    out: list[str] = []
    length = 1
    while len(out) < n:
        for combo in itertools.product(syllables, repeat=length):
            out.append("".join(combo))
            if len(out) == n:
                break
        length += 1
    return out


@dataclass
class SyntheticCorpus:
    documents: list[list[str]]
    lemma_table: dict[str, tuple[str, ...]]
    vocabulary: list[str]

    def texts(self) -> list[str]:
        return [" ".join(d) for d in self.documents]

    @property
    def n_tokens(self) -> int:
        return sum(len(d) for d in self.documents)

    def write(self, directory) -> None:
        """One ``docNNNNN.txt`` file per document plus ``lemmas.tsv``."""
        from pathlib import Path

        root = Path(directory)
        (root / "docs").mkdir(parents=True, exist_ok=True)
        for i, doc in enumerate(self.documents):
            (root / "docs" / f"doc{i:05d}.txt").write_text(" ".join(doc) + "\n", encoding="utf-8")
        lines = [f"{s}\t{','.join(forms)}" for s, forms in sorted(self.lemma_table.items())]
        (root / "lemmas.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")


def zipf_corpus(n_docs: int = 500, doc_length: int = 400, vocabulary: int = 20000, exponent: float = 1.1,
                ambiguous_fraction: float = 0.01, ambiguous_pool: int = 2000, seed: int = 0, length_jitter: float = 0.25) -> SyntheticCorpus:
    """Documents drawn from a Zipf(``exponent``) law over ``vocabulary`` words.

    ``ambiguous_fraction * vocabulary`` of the ``ambiguous_pool`` most
    frequent surface words carry a second basic form, drawn from the same
    law, so some tokens (and queries) straddle frequency classes.
    """
    rng = np.random.default_rng(seed)
    words = pseudo_words(vocabulary)
    ranks = np.arange(1, vocabulary + 1, dtype=np.float64)
    p = ranks ** -exponent
    p /= p.sum()
    lo = max(1, int(doc_length * (1 - length_jitter)))
    hi = int(doc_length * (1 + length_jitter)) + 1
    lengths = rng.integers(lo, hi, size=n_docs)
    docs = [[words[i] for i in rng.choice(vocabulary, size=int(n), p=p)] for n in lengths]
    table: dict[str, tuple[str, ...]] = {}
    n_amb = int(vocabulary * ambiguous_fraction)
    pool = min(vocabulary, max(ambiguous_pool, n_amb))
    for i in rng.choice(pool, size=n_amb, replace=False).tolist():
        other = int(rng.choice(vocabulary, p=p))
        if other != i:
            table[words[i]] = (words[i], words[other])
    return SyntheticCorpus(docs, table, words)


def stop_run_document(run_lengths, stop_word: str = "the", separator: str = "river") -> list[str]:
    """Maximal runs of ``stop_word`` separated by one non-stop token."""
    out: list[str] = []
    for i, s in enumerate(run_lengths):
        if i:
            out.append(separator)
        out += [stop_word] * s
    return out


def desk_config(**changes) -> IngestConfig:
    """Class sizes scaled to a corpus of a few hundred thousand tokens.

    With 700 stop forms a 200k-token Zipf(1.1) corpus is about 80% stop
    tokens; 30 stop and 300 frequent forms give roughly half stop tokens
    and a populated frequent class.
    """
    return IngestConfig(stop_size=30, frequent_size=300).replace(**changes)
