"""Shared corpus builders for the test suite."""

from __future__ import annotations

from phrasedex import IngestConfig, build_lexicon, ingest, open_index

# A hand-made lexicon in which the worked query examples classify as intended.
STOP_WORDS = ["the", "of", "a", "and", "about", "war", "for", "not", "only", "that", "but",
              "which", "it", "would", "be", "if", "as", "is", "into", "taken", "all"]
FREQUENT_WORDS = ["report", "river", "define", "red", "rise", "rose", "boundary", "thing", "walk", "whole"]
ORDINARY_WORDS = ["gallic", "fragrant", "necessary", "gaul", "divided", "three", "parts", "paragraph"]

LEMMAS = {
    "rose": ("rise", "rose"),
    "rivers": ("river",),
    "boundaries": ("boundary",),
    "reports": ("report",),
    "things": ("thing",),
    "walks": ("walk", "war"),
    "reds": ("red", "gallic"),
}


def small_counts() -> dict[str, int]:
    counts = {}
    for i, w in enumerate(STOP_WORDS):
        counts[w] = 10000 - 10 * i
    for i, w in enumerate(FREQUENT_WORDS):
        counts[w] = 900 - 50 * i
    for i, w in enumerate(ORDINARY_WORDS):
        counts[w] = 5 + i
    return counts


def small_lexicon():
    return build_lexicon(LEMMAS, small_counts(), stop_size=len(STOP_WORDS), frequent_size=len(FREQUENT_WORDS))


def build(path, docs, config: IngestConfig | None = None, lexicon=None, lemma_table=None):
    ingest(docs, path, config, lexicon=lexicon, lemma_table=lemma_table, created="test")
    return open_index(path)


def build_small(path, docs, config: IngestConfig | None = None):
    return build(path, docs, config, lexicon=small_lexicon())
