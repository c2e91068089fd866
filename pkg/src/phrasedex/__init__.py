"""Phrase search over additional indexes that keep stop words searchable."""

from .config import IngestConfig
from .errors import (
    DecodeError,
    EmptyQuery,
    IndexCorrupt,
    PhrasedexError,
    SelfMatchError,
    UnsupportedQuery,
)
from .index import Index, open_index
from .indexer import ingest
from .lexicon import FrequencyClass, Lexicon, build_lexicon, parse_lemma_table, tokenize
from .matches import Match
from .planner import QueryPlanner, QueryType
from .storage.streams import ReadStats

__version__ = "0.1.0"

__all__ = [
    "DecodeError", "EmptyQuery", "FrequencyClass", "Index", "IndexCorrupt", "IngestConfig",
    "Lexicon", "Match", "PhrasedexError", "QueryPlanner", "QueryType", "ReadStats",
    "SelfMatchError", "UnsupportedQuery", "build_lexicon", "ingest", "open_index",
    "parse_lemma_table", "tokenize",
]
