"""Dynamic bitvector: blocked big-int bitmap with a Fenwick position index.

Bits are stored LSB-first inside fixed-capacity Python-int blocks.  Two
Fenwick trees (block lengths, block one-counts) locate a position or an
occurrence in O(lg #blocks); within a block everything is mask/shift/popcount
on a single int.  Positions are 1-based throughout, matching the sequence
contract built on top.
"""

from __future__ import annotations

import numpy as np

from . import _fenwick as fw
from .errors import OccurrenceNotFound, PositionOutOfRange

BLOCK_BITS = 4096          # split threshold
HALF_BLOCK = BLOCK_BITS // 2   # fill used at bulk build time
MIN_BLOCK = BLOCK_BITS // 4    # merge/borrow threshold
_W = 64
_WMASK = (1 << _W) - 1


class _Block:
    __slots__ = ("bits", "length", "ones")

    def __init__(self, bits=0, length=0, ones=0):
        self.bits = bits
        self.length = length
        self.ones = ones


class DynamicBitvector:
    """Mutable bit sequence with rank/select/insert/delete/set."""

    def __init__(self):
        self._blocks = [_Block()]
        self._flen = fw.build([0])
        self._fones = fw.build([0])
        self.length = 0
        self.ones = 0

    # ------------------------------------------------------------------
    # construction

    @classmethod
    def from_bool_array(cls, arr) -> "DynamicBitvector":
        """Bulk-build from a numpy array of 0/1 values."""
        bv = cls()
        arr = np.asarray(arr, dtype=np.uint8)
        n = len(arr)
        if n == 0:
            return bv
        packed = np.packbits(arr, bitorder="little").tobytes()
        blocks = []
        for start in range(0, n, HALF_BLOCK):
            blen = min(HALF_BLOCK, n - start)
            raw = packed[start // 8 : (start + blen + 7) // 8]
            bits = int.from_bytes(raw, "little")
            bits &= (1 << blen) - 1
            blocks.append(_Block(bits, blen, bits.bit_count()))
        bv._blocks = blocks
        bv.length = n
        bv.ones = sum(b.ones for b in blocks)
        bv._rebuild_index()
        return bv

    def _rebuild_index(self):
        self._flen = fw.build([b.length for b in self._blocks])
        self._fones = fw.build([b.ones for b in self._blocks])

    # ------------------------------------------------------------------
    # queries

    def _locate(self, i):
        """Block index (0-based) and bit/one counts before it, for position i."""
        if len(self._blocks) == 1:
            return 0, 0, 0
        idx, before = fw.search(self._flen, i)
        ones_before = fw.prefix(self._fones, idx - 1)
        return idx - 1, before, ones_before

    def access(self, i: int) -> int:
        if i < 1 or i > self.length:
            raise PositionOutOfRange(f"bit position {i} not in 1..{self.length}")
        b, before, _ = self._locate(i)
        return (self._blocks[b].bits >> (i - before - 1)) & 1

    def rank1(self, i: int) -> int:
        """Number of 1 bits in positions 1..i (0 <= i <= length)."""
        if i < 0 or i > self.length:
            raise PositionOutOfRange(f"rank position {i} not in 0..{self.length}")
        if i == 0:
            return 0
        b, before, ones_before = self._locate(i)
        blk = self._blocks[b]
        k = i - before
        if k == blk.length:
            return ones_before + blk.ones
        return ones_before + (blk.bits & ((1 << k) - 1)).bit_count()

    def rank0(self, i: int) -> int:
        return i - self.rank1(i)

    def rank(self, bit: int, i: int) -> int:
        return self.rank1(i) if bit else self.rank0(i)

    def select1(self, k: int) -> int:
        """Position of the k-th 1 bit (1-based)."""
        if k < 1 or k > self.ones:
            raise OccurrenceNotFound(f"no {k}-th set bit (ones={self.ones})")
        if len(self._blocks) == 1:
            return self._select_in(self._blocks[0].bits, k)
        idx, before_ones = fw.search(self._fones, k)
        before = fw.prefix(self._flen, idx - 1)
        return before + self._select_in(self._blocks[idx - 1].bits, k - before_ones)

    def select0(self, k: int) -> int:
        zeros = self.length - self.ones
        if k < 1 or k > zeros:
            raise OccurrenceNotFound(f"no {k}-th clear bit (zeros={zeros})")
        # Fenwick over zero counts is derived: walk blocks via length - ones.
        before = 0
        rem = k
        for blk in self._blocks:
            z = blk.length - blk.ones
            if rem <= z:
                inv = (~blk.bits) & ((1 << blk.length) - 1)
                return before + self._select_in(inv, rem)
            rem -= z
            before += blk.length
        raise OccurrenceNotFound(f"no {k}-th clear bit")  # pragma: no cover

    def select(self, bit: int, k: int) -> int:
        return self.select1(k) if bit else self.select0(k)

    @staticmethod
    def _select_in(bits: int, k: int) -> int:
        """1-based position of the k-th set bit inside a block int."""
        off = 0
        while True:
            w = (bits >> off) & _WMASK
            c = w.bit_count()
            if k <= c:
                while True:
                    if w & 1:
                        k -= 1
                        if k == 0:
                            return off + 1
                    w >>= 1
                    off += 1
            k -= c
            off += _W

    def extract_bits(self, i: int, j: int):
        """Bits i..j as (int value with position i at bit 0, length)."""
        if i < 1 or j > self.length or i > j:
            raise PositionOutOfRange(f"bit range {i}..{j} not in 1..{self.length}")
        b, before, _ = self._locate(i)
        out = 0
        shift = 0
        want = j - i + 1
        skip = i - before - 1
        while want > 0:
            blk = self._blocks[b]
            take = min(blk.length - skip, want)
            out |= ((blk.bits >> skip) & ((1 << take) - 1)) << shift
            shift += take
            want -= take
            skip = 0
            b += 1
        return out, j - i + 1

    def extract_bool_array(self, i: int, j: int):
        """Bits i..j as a numpy uint8 array."""
        val, n = self.extract_bits(i, j)
        raw = val.to_bytes((n + 7) // 8, "little")
        return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:n]

    # ------------------------------------------------------------------
    # updates

    def insert(self, i: int, bit: int) -> None:
        if i < 1 or i > self.length + 1:
            raise PositionOutOfRange(f"insert position {i} not in 1..{self.length + 1}")
        if i == self.length + 1:
            b = len(self._blocks) - 1
            before = self.length - self._blocks[b].length
        else:
            b, before, _ = self._locate(i)
        blk = self._blocks[b]
        k = i - before - 1
        low = blk.bits & ((1 << k) - 1)
        high = blk.bits >> k
        blk.bits = low | ((bit & 1) << k) | (high << (k + 1))
        blk.length += 1
        blk.ones += bit & 1
        self.length += 1
        self.ones += bit & 1
        if blk.length > BLOCK_BITS:
            self._split(b)
        else:
            fw.update(self._flen, b + 1, 1)
            if bit:
                fw.update(self._fones, b + 1, 1)

    def delete(self, i: int) -> int:
        if i < 1 or i > self.length:
            raise PositionOutOfRange(f"delete position {i} not in 1..{self.length}")
        b, before, _ = self._locate(i)
        blk = self._blocks[b]
        k = i - before - 1
        bit = (blk.bits >> k) & 1
        low = blk.bits & ((1 << k) - 1)
        high = blk.bits >> (k + 1)
        blk.bits = low | (high << k)
        blk.length -= 1
        blk.ones -= bit
        self.length -= 1
        self.ones -= bit
        if blk.length < MIN_BLOCK and len(self._blocks) > 1:
            self._merge(b)
        else:
            fw.update(self._flen, b + 1, -1)
            if bit:
                fw.update(self._fones, b + 1, -1)
        return bit

    def set(self, i: int, bit: int) -> None:
        if i < 1 or i > self.length:
            raise PositionOutOfRange(f"set position {i} not in 1..{self.length}")
        b, before, _ = self._locate(i)
        blk = self._blocks[b]
        k = i - before - 1
        old = (blk.bits >> k) & 1
        if old == (bit & 1):
            return
        blk.bits ^= 1 << k
        delta = 1 if bit else -1
        blk.ones += delta
        self.ones += delta
        fw.update(self._fones, b + 1, delta)

    # ------------------------------------------------------------------
    # structural maintenance

    def _split(self, b):
        blk = self._blocks[b]
        half = blk.length // 2
        lo = _Block(blk.bits & ((1 << half) - 1), half, 0)
        lo.ones = lo.bits.bit_count()
        hi = _Block(blk.bits >> half, blk.length - half, blk.ones - lo.ones)
        self._blocks[b : b + 1] = [lo, hi]
        self._rebuild_index()

    def _merge(self, b):
        other = b - 1 if b > 0 else b + 1
        lo, hi = (other, b) if other < b else (b, other)
        left, right = self._blocks[lo], self._blocks[hi]
        merged = _Block(
            left.bits | (right.bits << left.length),
            left.length + right.length,
            left.ones + right.ones,
        )
        if merged.length > BLOCK_BITS:
            half = merged.length // 2
            a = _Block(merged.bits & ((1 << half) - 1), half, 0)
            a.ones = a.bits.bit_count()
            c = _Block(merged.bits >> half, merged.length - half, merged.ones - a.ones)
            self._blocks[lo : hi + 1] = [a, c]
        else:
            self._blocks[lo : hi + 1] = [merged]
        self._rebuild_index()

    # ------------------------------------------------------------------

    def payload_bits(self) -> int:
        """Stored data bits (the vector length), for space accounting."""
        return self.length

    def block_count(self) -> int:
        return len(self._blocks)

    def __len__(self):
        return self.length

    def check(self):
        """Internal consistency audit; raises AssertionError on violation."""
        total = 0
        ones = 0
        for blk in self._blocks:
            assert blk.bits >> blk.length == 0, "stray bits beyond block length"
            assert blk.ones == blk.bits.bit_count(), "block one-count drift"
            total += blk.length
            ones += blk.ones
        assert total == self.length and ones == self.ones, "global count drift"
        assert fw.prefix(self._flen, len(self._blocks)) == total
        assert fw.prefix(self._fones, len(self._blocks)) == ones
