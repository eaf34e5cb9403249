"""Frozen range majority/minority indexes over an immutable sequence.

The majority variant stores, for geometrically growing block sizes, a
count-ordered candidate list per block built at the smallest useful
threshold max(1/n, 1/sigma).  A query picks the level whose block size is at
most the range length, scans the starting block's candidate list, and stops
at the first stored count at or below threshold*(range length): stored
counts are exact window counts, so no later candidate (and no unlisted
symbol) can qualify.  Thresholds at or below the build threshold fall back
to testing all sigma symbols; ranges shorter than the smallest block are
counted directly.

The minority variant freezes the greedy piece partition (distinct-symbol
budget A = 1 + floor(1/alpha) per piece) with each piece's distinct symbols
listed in first-occurrence order.

Both are immutable after construction and can be serialized to a binary
snapshot (see docs/snapshot_format.md).
"""

from __future__ import annotations

import struct
from fractions import Fraction

import numpy as np

from .errors import (
    EmptyWindow,
    MalformedStream,
    PositionOutOfRange,
    ThresholdOutOfRange,
    TruncatedStream,
)

_MAGIC = b"MMSX"
_VERSION = 1
_MIN_BLOCK_LOG = 6  # ranges below 2^6 are counted directly


def _occurrence_lists(arr, sigma):
    """Per-symbol sorted position arrays (1-based)."""
    order = np.argsort(arr, kind="stable")
    counts = np.bincount(arr, minlength=sigma + 1)
    bounds = np.concatenate(([0], np.cumsum(counts)))
    occ = {}
    for c in range(1, sigma + 1):
        lo, hi = bounds[c], bounds[c + 1]
        if hi > lo:
            occ[c] = order[lo:hi] + 1
    return occ


def _count(occ, c, l, r):
    pos = occ.get(c)
    if pos is None:
        return 0
    return int(np.searchsorted(pos, r, "right") - np.searchsorted(pos, l - 1, "right"))


def _check_range(n, l, r):
    if l < 1 or r > n or l > r:
        raise PositionOutOfRange(f"range {l}..{r} not in 1..{n}")


class StaticMajorityIndex:
    """Variable-threshold range majority queries, frozen at build time."""

    def __init__(self, arr, sigma, *, _tables=None):
        arr = np.asarray(arr, dtype=np.int64)
        if len(arr) == 0:
            raise EmptyWindow("cannot freeze an empty sequence")
        self.arr = arr
        self.n = len(arr)
        self.sigma = sigma
        self.alpha_build = max(Fraction(1, self.n), Fraction(1, sigma))
        self.occ = _occurrence_lists(arr, sigma)
        self.level_lo = _MIN_BLOCK_LOG
        self.level_hi = self.n.bit_length() - 1  # largest k with 2^k <= n
        self.levels = _tables if _tables is not None else self._build_tables()
        self.stats = {"verify_pairs": 0, "stop_events": 0}

    @classmethod
    def freeze(cls, symbols, sigma) -> "StaticMajorityIndex":
        return cls(symbols, sigma)

    def _build_tables(self):
        levels = {}
        num = self.alpha_build.numerator
        den = self.alpha_build.denominator
        for k in range(self.level_lo, self.level_hi + 1):
            s = 1 << k
            thr = num * s  # candidate iff window count * den > thr
            blocks = []
            for start in range(0, self.n, s):
                window = self.arr[start : start + 3 * s]
                counts = np.bincount(window, minlength=self.sigma + 1)
                syms = np.flatnonzero(counts.astype(np.int64) * den > thr)
                cnts = counts[syms]
                order = np.lexsort((syms, -cnts))
                blocks.append((syms[order].astype(np.uint32),
                               cnts[order].astype(np.uint32)))
            levels[k] = blocks
        return levels

    def query(self, l, r, alpha):
        _check_range(self.n, l, r)
        alpha = Fraction(alpha)
        if not 0 < alpha < 1:
            raise ThresholdOutOfRange(f"threshold {alpha} not in (0,1)")
        rlen = r - l + 1
        thr = alpha * rlen
        if alpha <= self.alpha_build:
            return {c for c in range(1, self.sigma + 1)
                    if _count(self.occ, c, l, r) > thr}
        if rlen < (1 << self.level_lo) or self.level_hi < self.level_lo:
            counts = np.bincount(self.arr[l - 1 : r], minlength=self.sigma + 1)
            return {int(c) for c in np.flatnonzero(counts)
                    if counts[c] > thr}
        k = min(rlen.bit_length() - 1, self.level_hi)
        s = 1 << k
        syms, cnts = self.levels[k][(l - 1) // s]
        out = set()
        for sym, stored in zip(syms.tolist(), cnts.tolist()):
            if stored <= thr:  # exact counts: nothing later can qualify
                self.stats["stop_events"] += 1
                break
            self.stats["verify_pairs"] += 1
            if _count(self.occ, sym, l, r) > thr:
                out.add(sym)
        return out


class StaticMinorityIndex:
    """Fixed-threshold range minority queries, frozen at build time."""

    def __init__(self, arr, alpha, sigma, *, _tables=None):
        arr = np.asarray(arr, dtype=np.int64)
        if len(arr) == 0:
            raise EmptyWindow("cannot freeze an empty sequence")
        alpha = Fraction(alpha)
        if not 0 < alpha < 1:
            raise ThresholdOutOfRange(f"threshold {alpha} not in (0,1)")
        self.arr = arr
        self.n = len(arr)
        self.sigma = sigma
        self.alpha = alpha
        self.A = 1 + int(1 / alpha)
        self.occ = _occurrence_lists(arr, sigma)
        if _tables is not None:
            self.piece_starts, self.piece_cands = _tables
        else:
            self._build_pieces()
        self.stats = {"contained_fallbacks": 0}

    @classmethod
    def freeze(cls, symbols, alpha, sigma) -> "StaticMinorityIndex":
        return cls(symbols, alpha, sigma)

    def _build_pieces(self):
        starts = [1]
        cands = [[]]
        seen = set()
        for i, s in enumerate(self.arr.tolist(), start=1):
            if len(seen) == self.A:
                starts.append(i)
                cands.append([])
                seen = set()
            if s not in seen:
                seen.add(s)
                cands[-1].append(s)
        if len(seen) < self.A and len(starts) > 1:
            # Fold a short final fragment into the piece before it.
            starts.pop()
            tail = cands.pop()
            merged = set(cands[-1])
            cands[-1].extend(s for s in tail if s not in merged)
        self.piece_starts = np.asarray(starts, dtype=np.int64)
        self.piece_cands = cands

    def _piece_of(self, pos):
        return int(np.searchsorted(self.piece_starts, pos, "right"))

    def _piece_end(self, p):
        m = len(self.piece_starts)
        return int(self.piece_starts[p]) - 1 if p < m else self.n

    def query(self, l, r):
        _check_range(self.n, l, r)
        thr = self.alpha * (r - l + 1)
        fp = self._piece_of(l)
        lp = self._piece_of(r)
        if lp - fp <= 1:
            cands = self.piece_cands[fp - 1][:]
            if lp > fp:
                seen = set(cands)
                cands.extend(s for s in self.piece_cands[lp - 1]
                             if s not in seen)
            return self._first_minority(cands, l, r, thr)
        cands = self.piece_cands[fp]  # leftmost fully contained piece
        found = self._first_minority(cands, l, r, thr)
        if found is not None:
            return found
        # A*alpha > 1: a contained piece with >= A distinct symbols always
        # yields a minority; only a merged short final piece can fall short.
        assert len(cands) < self.A, (
            "contained piece with >= A distinct symbols yielded no minority")
        self.stats["contained_fallbacks"] += 1
        fallback = self.piece_cands[fp - 1] + self.piece_cands[lp - 1]
        return self._first_minority(fallback, l, r, thr)

    def _first_minority(self, cands, l, r, thr):
        for sym in cands:
            if 1 <= _count(self.occ, sym, l, r) <= thr:
                return sym
        return None


# ----------------------------------------------------------------------
# binary snapshot (little-endian; layout documented in docs/snapshot_format.md)

def _pack_array(out, arr, fmt_char):
    arr = np.asarray(arr)
    out.append(struct.pack("<I", len(arr)))
    out.append(arr.astype(np.dtype(fmt_char).newbyteorder("<")).tobytes())


class _Reader:
    def __init__(self, data):
        self.data = data
        self.pos = 0

    def take(self, nbytes):
        if self.pos + nbytes > len(self.data):
            raise TruncatedStream(
                f"snapshot ends at byte {len(self.data)}, "
                f"needed {self.pos + nbytes}")
        chunk = self.data[self.pos : self.pos + nbytes]
        self.pos += nbytes
        return chunk

    def u32(self):
        return struct.unpack("<I", self.take(4))[0]

    def u64(self):
        return struct.unpack("<Q", self.take(8))[0]

    def array(self, fmt_char):
        count = self.u32()
        dt = np.dtype(fmt_char).newbyteorder("<")
        return np.frombuffer(self.take(count * dt.itemsize), dtype=dt)


def snapshot_bytes(majority: StaticMajorityIndex,
                   minority: StaticMinorityIndex) -> bytes:
    if majority.n != minority.n or majority.sigma != minority.sigma:
        raise ValueError("majority and minority snapshots must share the text")
    out = [_MAGIC, struct.pack("<IQI", _VERSION, majority.n, majority.sigma),
           struct.pack("<II", minority.alpha.numerator,
                       minority.alpha.denominator)]
    _pack_array(out, majority.arr, "u4")
    out.append(struct.pack("<II", majority.level_lo, majority.level_hi))
    for k in range(majority.level_lo, majority.level_hi + 1):
        blocks = majority.levels[k]
        out.append(struct.pack("<I", len(blocks)))
        for syms, cnts in blocks:
            _pack_array(out, syms, "u4")
            _pack_array(out, cnts, "u4")
    _pack_array(out, minority.piece_starts, "u8")
    out.append(struct.pack("<I", len(minority.piece_cands)))
    for cands in minority.piece_cands:
        _pack_array(out, cands, "u4")
    return b"".join(out)


def save_snapshot(path, majority: StaticMajorityIndex,
                  minority: StaticMinorityIndex):
    with open(path, "wb") as fh:
        fh.write(snapshot_bytes(majority, minority))


def snapshot_from_bytes(data: bytes):
    rd = _Reader(data)
    if rd.take(4) != _MAGIC:
        raise MalformedStream("bad snapshot magic")
    version, n, sigma = struct.unpack("<IQI", rd.take(16))
    if version != _VERSION:
        raise MalformedStream(f"unsupported snapshot version {version}")
    a_num, a_den = struct.unpack("<II", rd.take(8))
    alpha = Fraction(a_num, a_den)
    arr = rd.array("u4").astype(np.int64)
    if len(arr) != n:
        raise MalformedStream(f"text length {len(arr)} != header n {n}")
    level_lo, level_hi = struct.unpack("<II", rd.take(8))
    levels = {}
    for k in range(level_lo, level_hi + 1):
        nblocks = rd.u32()
        levels[k] = [(rd.array("u4"), rd.array("u4")) for _ in range(nblocks)]
    starts = rd.array("u8").astype(np.int64)
    npieces = rd.u32()
    cands = [rd.array("u4").astype(np.int64).tolist() for _ in range(npieces)]
    maj = StaticMajorityIndex(arr, sigma, _tables=levels)
    mino = StaticMinorityIndex(arr, alpha, sigma, _tables=(starts, cands))
    return maj, mino


def load_snapshot(path):
    with open(path, "rb") as fh:
        return snapshot_from_bytes(fh.read())
