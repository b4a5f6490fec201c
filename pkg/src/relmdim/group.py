"""The acting group, fixed to the integers, and its finite windows.

Group elements are plain ``int``; composition is addition. Every finite
subset is a :class:`FiniteSubset`; intervals ``[start, start+length)`` are
the canonical Følner windows.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator

from .errors import InvalidArgument


class FiniteSubset:
    """A nonempty-or-empty finite set of integers, kept sorted."""

    __slots__ = ("elements", "_set")

    def __init__(self, elements: Iterable[int]):
        self._set = frozenset(int(e) for e in elements)
        self.elements = tuple(sorted(self._set))

    def __eq__(self, other):
        if isinstance(other, FiniteSubset):
            return self._set == other._set
        return NotImplemented

    def __hash__(self):
        return hash(self._set)

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, g) -> bool:
        return g in self._set

    def translate(self, g: int) -> "FiniteSubset":
        """The set gW = {g + w : w in W}."""
        return FiniteSubset(g + w for w in self.elements)

    def union(self, other: "FiniteSubset") -> "FiniteSubset":
        return FiniteSubset(self.elements + tuple(other))

    def thicken(self, r: int) -> "FiniteSubset":
        """W + [-r, r]."""
        return FiniteSubset(w + i for w in self.elements for i in range(-r, r + 1))

    def issubset(self, other: "FiniteSubset") -> bool:
        return self._set <= other._set

    def __repr__(self):
        return f"FiniteSubset({list(self.elements)})"


class FolnerWindow(FiniteSubset):
    """The interval {start, ..., start + length - 1}."""

    __slots__ = ("start", "length")

    def __init__(self, start: int, length: int):
        if length < 1:
            raise InvalidArgument(f"window length must be positive, got {length}")
        super().__init__(range(start, start + length))
        self.start = start
        self.length = length

    def __repr__(self):
        return f"FolnerWindow(start={self.start}, length={self.length})"


def folner_window(n: int) -> FolnerWindow:
    """G_n = [0, n)."""
    if n < 1:
        raise InvalidArgument(f"n must be >= 1, got {n}")
    return FolnerWindow(0, n)


def folner_defect(W: FiniteSubset, g: int) -> Fraction:
    """|W Δ (g + W)| / |W| as an exact rational."""
    if len(W) == 0:
        raise InvalidArgument("empty window")
    a = set(W)
    b = {g + w for w in a}
    return Fraction(len(a ^ b), len(a))


def as_subset(obj) -> FiniteSubset:
    if isinstance(obj, FiniteSubset):
        return obj
    return FiniteSubset(obj)
