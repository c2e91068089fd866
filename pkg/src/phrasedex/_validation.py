"""Argument checks shared by the estimator and the command line."""

from __future__ import annotations

from collections.abc import Iterable, Mapping

from .errors import EmptyQuery
from .lexicon import tokenize


def check_documents(X) -> list[str]:
    """Return ``X`` as a list of document strings.

    Accepts strings or token sequences; rejects a bare string (which would
    otherwise be read as a sequence of one-character documents).
    """
    if isinstance(X, (str, bytes)) or isinstance(X, Mapping) or not isinstance(X, Iterable):
        raise TypeError(f"expected an iterable of documents, got {type(X).__name__}")
    out = []
    for i, doc in enumerate(X):
        if isinstance(doc, str):
            out.append(doc)
        elif isinstance(doc, Iterable) and not isinstance(doc, bytes):
            tokens = list(doc)
            if not all(isinstance(t, str) for t in tokens):
                raise TypeError(f"document {i}: tokens must be strings")
            out.append(" ".join(tokens))
        else:
            raise TypeError(f"document {i}: expected a string or token list, got {type(doc).__name__}")
    return out


def check_query(query) -> list[str]:
    """Return the query words; raises :class:`EmptyQuery` when there are none."""
    if isinstance(query, str):
        words = tokenize(query)
    elif isinstance(query, Iterable):
        query = list(query)
        words = [w for t in query for w in tokenize(t)] if all(isinstance(t, str) for t in query) else None
        if words is None:
            raise TypeError("query words must be strings")
    else:
        raise TypeError(f"expected a query string or word list, got {type(query).__name__}")
    if not words:
        raise EmptyQuery("query has no words")
    return words


def check_queries(X) -> list[list[str]]:
    if isinstance(X, str) or not isinstance(X, Iterable):
        raise TypeError("expected an iterable of queries")
    return [check_query(q) for q in X]


def check_positive(name: str, value, allow_none: bool = False) -> None:
    if value is None and allow_none:
        return
    if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
