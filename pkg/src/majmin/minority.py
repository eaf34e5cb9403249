"""Dynamic range minority index: piece partition with marked occurrences.

The sequence is partitioned into consecutive pieces, each holding between
A = 1 + floor(1/alpha) and 3A distinct symbols (a sole piece may hold
fewer).  Bitvector P marks piece starts; bitvector C marks exactly one
occurrence of each distinct symbol inside each piece.  A query range that
overlaps at most two pieces is answered by counting all (<= 6A) marked
candidates; a range spanning three or more pieces contains a whole piece,
and among that piece's >= A distinct symbols a minority of the range must
exist whenever the range has one (if all of them exceeded alpha*r
occurrences, the range would hold more than A*alpha*r > r symbols).

Pieces that grow past 3A distinct symbols are repartitioned into fresh
pieces of exactly A distinct symbols (a short final fragment is folded into
the piece before it); pieces that fall below A distinct symbols are merged
with a neighbor.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction

import numpy as np

from .bitvector import DynamicBitvector
from .errors import PositionOutOfRange, ThresholdOutOfRange
from .sequence import DynamicSequence


class MinorityIndex:
    """Fixed-threshold range minority queries over a DynamicSequence."""

    def __init__(self, seq: DynamicSequence, alpha):
        alpha = Fraction(alpha)
        if not 0 < alpha < 1:
            raise ThresholdOutOfRange(f"threshold {alpha} not in (0,1)")
        self.seq = seq
        self.alpha = alpha
        self.A = 1 + int(1 / alpha)
        self.stats = Counter()
        self.P = DynamicBitvector()
        self.C = DynamicBitvector()
        self._build_partition()

    @classmethod
    def build(cls, symbols, alpha, sigma) -> "MinorityIndex":
        seq = DynamicSequence.from_array(np.asarray(symbols, dtype=np.int64), sigma)
        return cls(seq, alpha)

    @property
    def n(self):
        return self.seq.length

    @property
    def piece_count(self):
        return self.P.rank1(len(self.P)) if len(self.P) else 0

    def phi(self):
        """Potential n - A*(m-1); decreases by A per piece a repartition
        emits and moves by one per update (instrumentation only)."""
        m = self.piece_count
        return self.n - self.A * (m - 1) if m else 0

    # ------------------------------------------------------------------
    # construction

    def _build_partition(self):
        n = self.seq.length
        p_bits = np.zeros(n, dtype=bool)
        c_bits = np.zeros(n, dtype=bool)
        if n:
            syms = self.seq.to_array()
            start = 0
            distinct = set()
            for i in range(n):
                if len(distinct) == self.A:
                    p_bits[i] = True
                    start = i
                    distinct = set()
                s = int(syms[i])
                if s not in distinct:
                    distinct.add(s)
                    c_bits[i] = True
            p_bits[0] = True
            # A trailing fragment below A distinct symbols folds into the
            # piece before it (unless it is the only piece).
            if len(distinct) < self.A:
                starts = np.nonzero(p_bits)[0]
                if len(starts) > 1:
                    last = starts[-1]
                    p_bits[last] = False
                    seen_before = set(
                        int(s) for s in syms[starts[-2] : last])
                    for i in range(last, n):
                        s = int(syms[i])
                        if c_bits[i] and s in seen_before:
                            c_bits[i] = False
                        seen_before.add(s)
        self.P = DynamicBitvector.from_bool_array(p_bits)
        self.C = DynamicBitvector.from_bool_array(c_bits)

    # ------------------------------------------------------------------
    # queries

    def _piece_span(self, p):
        """1-based [start, end] of piece number p."""
        x = self.P.select1(p)
        m = self.piece_count
        y = self.P.select1(p + 1) - 1 if p < m else self.n
        return x, y

    def _piece_candidates(self, x, y):
        base = self.C.rank1(x - 1)
        cnt = self.C.rank1(y) - base
        return [self.C.select1(base + k) for k in range(1, cnt + 1)]

    def query(self, l: int, r: int):
        """One symbol occurring in S[l..r] at least once and at most
        alpha*(r-l+1) times, or None when every occurring symbol exceeds
        the threshold."""
        n = self.seq.length
        if l < 1 or r > n or l > r:
            raise PositionOutOfRange(f"range {l}..{r} not in 1..{n}")
        fp = self.P.rank1(l)
        lp = self.P.rank1(r)
        thr = self.alpha * (r - l + 1)
        if lp - fp <= 1:
            x, _ = self._piece_span(fp)
            _, y = self._piece_span(lp)
            found = self._first_minority(self._piece_candidates(x, y), l, r, thr)
            self.stats["queries_piece_pair"] += 1
            return found
        self.stats["queries_contained"] += 1
        x, y = self._piece_span(fp + 1)
        cands = self._piece_candidates(x, y)
        found = self._first_minority(cands, l, r, thr)
        if found is not None:
            return found
        # A*alpha > 1, so A distinct symbols all exceeding alpha*(r-l+1)
        # occurrences would overfill the range: a contained piece with >= A
        # distinct symbols always yields a minority.
        assert len(cands) < self.A, (
            "contained piece with >= A distinct symbols yielded no minority")
        # A merged final piece may hold < A distinct symbols; fall back to the
        # boundary pieces' candidates and count the event for audits.
        self.stats["contained_fallbacks"] += 1
        x1, y1 = self._piece_span(fp)
        x2, y2 = self._piece_span(lp)
        return self._first_minority(
            self._piece_candidates(x1, y1) + self._piece_candidates(x2, y2),
            l, r, thr)

    def _first_minority(self, positions, l, r, thr):
        seq = self.seq
        for pos in positions:
            sym = seq.access(pos)
            occ = seq.rank(sym, r) - seq.rank(sym, l - 1)
            self.stats["candidates_counted"] += 1
            if 1 <= occ <= thr:
                return sym
        return None

    # ------------------------------------------------------------------
    # updates (sequence already updated by the caller/facade)

    def insert(self, c: int, i: int) -> None:
        self.seq.insert(i, c)
        self.notify_insert(c, i)

    def delete(self, i: int) -> int:
        c = self.seq.delete(i)
        self.notify_delete(i, c)
        return c

    def notify_insert(self, c, i):
        self.stats["updates"] += 1
        self.P.insert(i, 0)
        self.C.insert(i, 0)
        if i == 1:
            # The piece that started at the old position 1 now starts here.
            if len(self.P) > 1:
                self.P.set(2, 0)
            self.P.set(1, 1)
        p = self.P.rank1(i)
        x, y = self._piece_span(p)
        if self.seq.rank(c, y) - self.seq.rank(c, x - 1) == 1:
            self.C.set(i, 1)
            if self.C.rank1(y) - self.C.rank1(x - 1) > 3 * self.A:
                self._repartition(x, y)

    def notify_delete(self, i, c):
        self.stats["updates"] += 1
        pbit = self.P.delete(i)
        cbit = self.C.delete(i)
        n = self.seq.length
        if n == 0:
            return
        if pbit and i <= n and self.P.access(i) == 0:
            self.P.set(i, 1)  # the piece lost its first position, not itself
        # The deleted position's piece: if it was a piece start the start was
        # just restored at i; otherwise a successor piece's start may have
        # shifted into i, so resolve the piece from position i - 1.
        p = self.P.rank1(i) if pbit else self.P.rank1(i - 1)
        x, y = self._piece_span(p)
        if cbit:
            before = self.seq.rank(c, x - 1)
            if self.seq.rank(c, y) - before >= 1:
                self.C.set(self.seq.select(c, before + 1), 1)
            elif (self.C.rank1(y) - self.C.rank1(x - 1) < self.A
                  and self.piece_count > 1):
                self._merge_piece(p)

    def _merge_piece(self, p):
        m = self.piece_count
        if p > 1:
            x, _ = self._piece_span(p - 1)
            start, y = self._piece_span(p)
        else:
            x, _ = self._piece_span(1)
            start, y = self._piece_span(2)
        self.P.set(start, 0)
        # Merged span: drop duplicate marks for symbols present on both sides.
        for pos in self._piece_candidates(start, y):
            sym = self.seq.access(pos)
            if self.seq.rank(sym, start - 1) - self.seq.rank(sym, x - 1) > 0:
                self.C.set(pos, 0)
        if self.C.rank1(y) - self.C.rank1(x - 1) > 3 * self.A:
            self._repartition(x, y)

    def _repartition(self, x, y):
        """Split the single piece [x, y] into pieces of exactly A distinct
        symbols, folding a short final fragment into the piece before it."""
        A = self.A
        for pos in self._piece_candidates(x, y):
            self.C.set(pos, 0)
        syms = self.seq.extract(x, y).tolist()
        total = len(syms)
        pos = 0
        spans = []  # (rel start, rel end exclusive)
        while pos < total:
            firsts = []
            seen = set()
            for j in range(pos, total):
                if syms[j] not in seen:
                    seen.add(syms[j])
                    firsts.append(j)
                    if len(firsts) > A:
                        break
            if len(firsts) <= A:
                if len(firsts) < A and spans:
                    spans[-1] = (spans[-1][0], total)
                else:
                    spans.append((pos, total))
                break
            spans.append((pos, firsts[A]))
            pos = firsts[A]
        self.stats["pieces_produced"] += len(spans)
        self.stats["repartitions"] += 1
        for k, (s, e) in enumerate(spans):
            if k > 0:
                self.P.set(x + s, 1)
            seen = set()
            for j in range(s, e):
                if syms[j] not in seen:
                    seen.add(syms[j])
                    self.C.set(x + j, 1)

    # ------------------------------------------------------------------
    # audits

    def audit(self, arr=None):
        n = self.seq.length
        assert len(self.P) == n and len(self.C) == n
        if n == 0:
            return
        if arr is None:
            arr = self.seq.to_array()
        assert self.P.access(1) == 1
        m = self.piece_count
        A = self.A
        starts = [self.P.select1(k) for k in range(1, m + 1)]
        for k, x in enumerate(starts):
            y = starts[k + 1] - 1 if k + 1 < m else n
            piece = arr[x - 1 : y]
            distinct = set(int(s) for s in piece)
            if m > 1:
                assert A <= len(distinct) <= 3 * A, (
                    f"piece {k + 1} has {len(distinct)} distinct, A={A}")
            else:
                assert len(distinct) <= 3 * A
            marks = self._piece_candidates(x, y)
            marked_syms = [int(arr[pos - 1]) for pos in marks]
            assert sorted(set(marked_syms)) == sorted(marked_syms), (
                "duplicate mark inside a piece")
            assert set(marked_syms) == distinct, "mark set != distinct set"
