"""Query results and their ordering."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable


@dataclass(frozen=True)
class Match:
    """One hit: a document, a position per query word and the covering span.

    Distance-free (document-level) hits carry ``span=None`` and may leave
    positions of stop words as ``None``.
    """

    doc: int
    positions: tuple[int | None, ...]
    span: int | None = None

    @property
    def distance_aware(self) -> bool:
        return self.span is not None

    @property
    def first_position(self) -> int:
        present = [p for p in self.positions if p is not None]
        return present[0] if present else -1

    def sort_key(self):
        return (self.span is None, self.span or 0, self.doc, self.first_position,
                tuple(-1 if p is None else p for p in self.positions))

    def identity(self) -> tuple:
        return (self.doc, self.positions)


def sort_matches(matches: Iterable[Match]) -> list[Match]:
    """Deduplicate on ``(doc, positions)`` and order by span, doc, first position.

    A distance-aware hit wins over a distance-free one with the same identity.
    """
    best: dict[tuple, Match] = {}
    for m in matches:
        prev = best.get(m.identity())
        if prev is None or (not prev.distance_aware and m.distance_aware):
            best[m.identity()] = m
    return sorted(best.values(), key=Match.sort_key)
