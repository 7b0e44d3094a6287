"""Span-based text edits with byte-exact preservation of untouched regions."""

from __future__ import annotations

from dataclasses import dataclass


class EditError(Exception):
    pass


class OverlapError(EditError):
    def __init__(self, first: Edit, second: Edit):
        super().__init__(f"edits overlap: {first.span} and {second.span}")
        self.pair = (first, second)


class BoundsError(EditError):
    pass


@dataclass(frozen=True)
class Edit:
    path: str
    start: int
    end: int
    replacement: str

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


def check_disjoint(edits: list[Edit]) -> list[Edit]:
    """Return edits sorted by position; raise OverlapError on any overlap.

    Two insertions at the same offset also count as overlapping since their
    relative order would be ambiguous.
    """
    ordered = sorted(edits, key=lambda e: (e.start, e.end))
    for a, b in zip(ordered, ordered[1:]):
        if b.start < a.end or (a.start == a.end == b.start == b.end):
            raise OverlapError(a, b)
    return ordered


def apply_edits(source: str, edits: list[Edit]) -> str:
    ordered = check_disjoint(edits)
    out = []
    prev = 0
    for e in ordered:
        if not 0 <= e.start <= e.end <= len(source):
            raise BoundsError(f"edit span {e.span} outside [0, {len(source)}]")
        out.append(source[prev : e.start])
        out.append(e.replacement)
        prev = e.end
    out.append(source[prev:])
    return "".join(out)
