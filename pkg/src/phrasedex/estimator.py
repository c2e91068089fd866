"""scikit-learn style wrapper: ``fit`` builds an index, ``predict`` searches it."""

from __future__ import annotations

import shutil
import tempfile
import weakref
from dataclasses import fields
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from ._validation import check_documents, check_positive, check_queries, check_query
from .config import IngestConfig
from .index import Index
from .indexer import ingest
from .matches import Match
from .planner import QueryPlanner
from .storage.streams import ReadStats

_CONFIG_FIELDS = tuple(f.name for f in fields(IngestConfig))
_DEFAULTS = IngestConfig()


class PhraseSearchIndex(BaseEstimator):
    """Phrase search over a corpus of documents.

    Parameters
    ----------
    min_length ... frequent_size : build parameters, see ``IngestConfig``.
    lemma_table : mapping, path or None
        Surface word to basic forms; words not listed are their own form.
    fallback : bool
        Use the document-level fallback when no proximity match exists.
    exact_order : bool
        Require query words at their exact relative offsets.
    max_results : int or None
        Truncate each result list.
    index_dir : path or None
        Where to build; a temporary directory when None.
    """

    def __init__(self, min_length=_DEFAULTS.min_length, max_length=_DEFAULTS.max_length,
                 max_distance_frequent=_DEFAULTS.max_distance_frequent,
                 max_distance_ordinary=_DEFAULTS.max_distance_ordinary,
                 processing_distance_top=_DEFAULTS.processing_distance_top,
                 processing_distance_rest=_DEFAULTS.processing_distance_rest,
                 top_tier_fraction=_DEFAULTS.top_tier_fraction, ordinary_distance=_DEFAULTS.ordinary_distance,
                 rare_doc_threshold=_DEFAULTS.rare_doc_threshold, cartesian_cap=_DEFAULTS.cartesian_cap,
                 key_codec=_DEFAULTS.key_codec, build_baseline=_DEFAULTS.build_baseline,
                 segment_cap=_DEFAULTS.segment_cap, stop_size=_DEFAULTS.stop_size,
                 frequent_size=_DEFAULTS.frequent_size, lemma_table=None, fallback=True, exact_order=False,
                 max_results=None, index_dir=None):
        self.min_length = min_length
        self.max_length = max_length
        self.max_distance_frequent = max_distance_frequent
        self.max_distance_ordinary = max_distance_ordinary
        self.processing_distance_top = processing_distance_top
        self.processing_distance_rest = processing_distance_rest
        self.top_tier_fraction = top_tier_fraction
        self.ordinary_distance = ordinary_distance
        self.rare_doc_threshold = rare_doc_threshold
        self.cartesian_cap = cartesian_cap
        self.key_codec = key_codec
        self.build_baseline = build_baseline
        self.segment_cap = segment_cap
        self.stop_size = stop_size
        self.frequent_size = frequent_size
        self.lemma_table = lemma_table
        self.fallback = fallback
        self.exact_order = exact_order
        self.max_results = max_results
        self.index_dir = index_dir

    def ingest_config(self) -> IngestConfig:
        return IngestConfig(**{k: getattr(self, k) for k in _CONFIG_FIELDS})

    def fit(self, X, y=None):
        """Build the index over the documents in ``X``."""
        docs = check_documents(X)
        check_positive("max_results", self.max_results, allow_none=True)
        config = self.ingest_config()
        self._release()
        if self.index_dir is None:
            path = Path(tempfile.mkdtemp(prefix="phrasedex-"))
            self._cleanup = weakref.finalize(self, shutil.rmtree, str(path), True)
        else:
            path = Path(self.index_dir)
        ingest(docs, path, config, lemma_table=self.lemma_table)
        self.index_ = Index(path)
        self.planner_ = QueryPlanner(self.index_, fallback=self.fallback, exact_order=self.exact_order)
        self.n_documents_ = len(docs)
        self.lexicon_ = self.index_.lexicon
        return self

    def _release(self) -> None:
        if getattr(self, "index_", None) is not None:
            self.index_.close()
        cleanup = getattr(self, "_cleanup", None)
        if cleanup is not None:
            cleanup()
            self._cleanup = None

    def _check_fitted(self) -> None:
        if getattr(self, "index_", None) is None:
            raise NotFittedError("call fit before searching")

    def search_with_stats(self, query) -> tuple[list[Match], ReadStats]:
        self._check_fitted()
        stats = ReadStats()
        found = self.planner_.search(check_query(query), stats, max_results=self.max_results)
        return found, stats

    def search(self, query) -> list[Match]:
        return self.search_with_stats(query)[0]

    def predict(self, X) -> list[np.ndarray]:
        """Sorted matching document ids for each query in ``X``."""
        self._check_fitted()
        out = []
        for words in check_queries(X):
            found = self.planner_.search(words, max_results=self.max_results)
            out.append(np.unique(np.fromiter((m.doc for m in found), dtype=np.int64)))
        return out

    def transform(self, X) -> np.ndarray:
        """Match counts, shape ``(n_queries, n_documents)``."""
        self._check_fitted()
        queries = check_queries(X)
        out = np.zeros((len(queries), self.n_documents_), dtype=np.int64)
        for i, words in enumerate(queries):
            for m in self.planner_.search(words, max_results=self.max_results):
                out[i, m.doc] += 1
        return out
