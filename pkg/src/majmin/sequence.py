"""Dynamic sequence over a fixed alphabet, as a wavelet tree of dynamic bitvectors.

Symbols are 1..sigma; internally symbol c is routed by the bits of c-1,
most significant first, through a perfect binary tree of depth ceil(lg sigma).
Every operation is a root-to-leaf walk doing one bitvector operation per level.
"""

from __future__ import annotations

import math

import numpy as np

from .bitvector import DynamicBitvector
from .errors import (
    EmptyRange,
    OccurrenceNotFound,
    PositionOutOfRange,
    SymbolOutOfRange,
)


class DynamicSequence:
    """Mutable symbol sequence with access/rank/select/insert/delete/extract."""

    def __init__(self, sigma: int):
        if sigma < 1:
            raise SymbolOutOfRange(f"alphabet size {sigma} must be >= 1")
        self.sigma = sigma
        self.depth = max(1, math.ceil(math.log2(sigma))) if sigma > 1 else 1
        self.length = 0
        # Internal nodes of a perfect binary tree, heap-numbered from 1;
        # bitvectors are created lazily for touched nodes.
        self._nodes: dict[int, DynamicBitvector] = {1: DynamicBitvector()}

    # ------------------------------------------------------------------
    # construction

    @classmethod
    def from_array(cls, arr, sigma: int) -> "DynamicSequence":
        """Bulk-build from a numpy array (or list) of symbols 1..sigma."""
        seq = cls(sigma)
        codes = np.asarray(arr, dtype=np.int64) - 1
        n = len(codes)
        if n == 0:
            return seq
        if codes.min() < 0 or codes.max() >= 1 << seq.depth or (
            sigma > 1 and codes.max() >= sigma
        ):
            raise SymbolOutOfRange("symbol outside 1..sigma in bulk build")
        seq.length = n
        seq._nodes = {}
        stack = [(1, 0, codes)]
        while stack:
            node, level, part = stack.pop()
            bits = (part >> (seq.depth - 1 - level)) & 1
            seq._nodes[node] = DynamicBitvector.from_bool_array(bits)
            if level + 1 < seq.depth:
                left = part[bits == 0]
                right = part[bits == 1]
                if len(left):
                    stack.append((2 * node, level + 1, left))
                if len(right):
                    stack.append((2 * node + 1, level + 1, right))
        return seq

    # ------------------------------------------------------------------
    # helpers

    def _check_pos(self, i, hi=None):
        hi = self.length if hi is None else hi
        if i < 1 or i > hi:
            raise PositionOutOfRange(f"position {i} not in 1..{hi}")

    def _check_sym(self, c):
        if c < 1 or c > self.sigma:
            raise SymbolOutOfRange(f"symbol {c} not in 1..{self.sigma}")

    def _node(self, node) -> DynamicBitvector:
        bv = self._nodes.get(node)
        if bv is None:
            bv = self._nodes[node] = DynamicBitvector()
        return bv

    # ------------------------------------------------------------------
    # queries

    def access(self, i: int) -> int:
        self._check_pos(i)
        node = 1
        code = 0
        for _ in range(self.depth):
            bv = self._nodes[node]
            bit = bv.access(i)
            code = (code << 1) | bit
            i = bv.rank(bit, i)
            node = 2 * node + bit
        return code + 1

    def rank(self, c: int, i: int) -> int:
        """Occurrences of symbol c in positions 1..i (0 <= i <= length)."""
        self._check_sym(c)
        if i < 0 or i > self.length:
            raise PositionOutOfRange(f"position {i} not in 0..{self.length}")
        code = c - 1
        node = 1
        for level in range(self.depth):
            if i == 0:
                return 0
            bv = self._nodes.get(node)
            if bv is None:
                return 0
            bit = (code >> (self.depth - 1 - level)) & 1
            i = bv.rank(bit, i)
            node = 2 * node + bit
        return i

    def select(self, c: int, k: int) -> int:
        """Position of the k-th occurrence of symbol c (1-based)."""
        self._check_sym(c)
        if k < 1:
            raise OccurrenceNotFound(f"occurrence index {k} must be >= 1")
        code = c - 1
        node = 1
        path = []
        for level in range(self.depth):
            bv = self._nodes.get(node)
            if bv is None:
                raise OccurrenceNotFound(f"symbol {c} has no {k}-th occurrence")
            bit = (code >> (self.depth - 1 - level)) & 1
            path.append((bv, bit))
            node = 2 * node + bit
        pos = k
        for bv, bit in reversed(path):
            if pos > (bv.ones if bit else bv.length - bv.ones):
                raise OccurrenceNotFound(f"symbol {c} has no {k}-th occurrence")
            pos = bv.select(bit, pos)
        return pos

    def count_range(self, c: int, i: int, j: int) -> int:
        """Occurrences of symbol c in positions i..j."""
        if i > j:
            return 0
        return self.rank(c, j) - self.rank(c, i - 1)

    def extract(self, i: int, j: int) -> np.ndarray:
        """Symbols at positions i..j, in order, as a numpy int64 array."""
        if i > j:
            raise EmptyRange(f"extract range {i}..{j} is empty")
        self._check_pos(i)
        self._check_pos(j)
        out = self._extract_rec(1, 0, i, j, 0)
        return out + 1

    def _extract_rec(self, node, level, lo, hi, prefix):
        bv = self._nodes.get(node)
        if bv is None or lo > hi:
            return np.full(max(0, hi - lo + 1), prefix << (self.depth - level),
                           dtype=np.int64)
        bits = bv.extract_bool_array(lo, hi)
        if level + 1 == self.depth:
            base = prefix << 1
            return base + bits.astype(np.int64)
        r0 = bv.rank0(lo - 1)
        r1 = (lo - 1) - r0
        n0 = int((bits == 0).sum())
        n1 = len(bits) - n0
        out = np.empty(len(bits), dtype=np.int64)
        if n0:
            out[bits == 0] = self._extract_rec(
                2 * node, level + 1, r0 + 1, r0 + n0, prefix << 1)
        if n1:
            out[bits == 1] = self._extract_rec(
                2 * node + 1, level + 1, r1 + 1, r1 + n1, (prefix << 1) | 1)
        return out

    def range_counts(self, i: int, j: int) -> dict[int, int]:
        """Map symbol -> occurrence count over positions i..j (non-zero only)."""
        if i > j:
            return {}
        self._check_pos(i)
        self._check_pos(j)
        out: dict[int, int] = {}
        stack = [(1, 0, i, j, 0)]
        while stack:
            node, level, lo, hi, prefix = stack.pop()
            bv = self._nodes.get(node)
            if bv is None:
                out[(prefix << (self.depth - level)) + 1] = hi - lo + 1
                continue
            z_lo = bv.rank0(lo - 1)
            z_hi = bv.rank0(hi)
            n0 = z_hi - z_lo
            n1 = (hi - lo + 1) - n0
            if level + 1 == self.depth:
                if n0:
                    out[(prefix << 1) + 1] = n0
                if n1:
                    out[(prefix << 1) + 2] = n1
            else:
                if n0:
                    stack.append((2 * node, level + 1, z_lo + 1, z_hi, prefix << 1))
                if n1:
                    o_lo = lo - 1 - z_lo
                    stack.append((2 * node + 1, level + 1, o_lo + 1, o_lo + n1,
                                  (prefix << 1) | 1))
        return out

    # ------------------------------------------------------------------
    # updates

    def insert(self, i: int, c: int) -> None:
        self._check_pos(i, self.length + 1)
        self._check_sym(c)
        code = c - 1
        node = 1
        for level in range(self.depth):
            bv = self._node(node)
            bit = (code >> (self.depth - 1 - level)) & 1
            bv.insert(i, bit)
            i = bv.rank(bit, i)
            node = 2 * node + bit
        self.length += 1

    def delete(self, i: int) -> int:
        """Remove and return the symbol at position i."""
        self._check_pos(i)
        node = 1
        code = 0
        for _ in range(self.depth):
            bv = self._nodes[node]
            bit = bv.access(i)
            nxt = bv.rank(bit, i)
            bv.delete(i)
            code = (code << 1) | bit
            i = nxt
            node = 2 * node + bit
        self.length -= 1
        return code + 1

    # ------------------------------------------------------------------

    def payload_bits(self) -> int:
        """Total stored bits across all wavelet levels."""
        return sum(bv.length for bv in self._nodes.values())

    def __len__(self):
        return self.length

    def to_array(self) -> np.ndarray:
        if self.length == 0:
            return np.empty(0, dtype=np.int64)
        return self.extract(1, self.length)

    def check(self):
        """Audit node bitvectors and cross-level length consistency."""
        root = self._nodes.get(1)
        assert root is None or root.length == self.length
        for node, bv in self._nodes.items():
            bv.check()
            # Children partition the parent's positions by bit value.
            left = self._nodes.get(2 * node)
            right = self._nodes.get(2 * node + 1)
            if left is not None:
                assert left.length == bv.length - bv.ones
            if right is not None:
                assert right.length == bv.ones
