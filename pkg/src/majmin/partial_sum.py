"""Small dynamic nonnegative-integer sequence: prefix sum, search, point update.

Used for navigation tables over descendant block lengths and for B-tree
subtree sizes.  Entry counts stay small (O(lg n)), so a Fenwick tree gives
comfortably cheap operations and trivial rebuilds.
"""

from __future__ import annotations

from . import _fenwick as fw
from .errors import IndexOutOfRange, NegativeResult, ValueOutOfRange


class PartialSumSeq:
    """Nonnegative integers with sum(i), search(x), and update(i, delta)."""

    __slots__ = ("_entries", "_tree", "total")

    def __init__(self, values=()):
        values = list(values)
        if any(v < 0 for v in values):
            raise NegativeResult("entries must be nonnegative")
        self._entries = values
        self._tree = fw.build(values)
        self.total = sum(values)

    @classmethod
    def rebuild(cls, values) -> "PartialSumSeq":
        return cls(values)

    @property
    def m(self) -> int:
        return len(self._entries)

    def __len__(self):
        return len(self._entries)

    def entry(self, i: int) -> int:
        """Value of entry i (1-based)."""
        if i < 1 or i > len(self._entries):
            raise IndexOutOfRange(f"entry index {i} not in 1..{len(self._entries)}")
        return self._entries[i - 1]

    def sum(self, i: int) -> int:
        """Sum of entries 1..i; sum(0) = 0."""
        if i < 0 or i > len(self._entries):
            raise IndexOutOfRange(f"prefix index {i} not in 0..{len(self._entries)}")
        return fw.prefix(self._tree, i)

    def search(self, x: int) -> int:
        """Smallest i with sum(i) >= x."""
        if x < 1 or x > self.total:
            raise ValueOutOfRange(f"search value {x} not in 1..{self.total}")
        return fw.search(self._tree, x)[0]

    def update(self, i: int, delta: int) -> None:
        if i < 1 or i > len(self._entries):
            raise IndexOutOfRange(f"entry index {i} not in 1..{len(self._entries)}")
        if self._entries[i - 1] + delta < 0:
            raise NegativeResult(
                f"entry {i} would become {self._entries[i - 1] + delta}")
        self._entries[i - 1] += delta
        fw.update(self._tree, i, delta)
        self.total += delta

    def to_list(self) -> list[int]:
        return list(self._entries)

    def payload_bits(self, entry_bits: int) -> int:
        """Space accounting: m entries at the given field width."""
        return len(self._entries) * entry_bits

    def __repr__(self):
        return f"PartialSumSeq({self._entries!r})"
