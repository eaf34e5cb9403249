"""Dynamic range majority index with query-time thresholds.

Structure summary
-----------------
The symbol sequence lives in a wavelet tree (`DynamicSequence`).  On top of
it sits a weight-balanced tree with branching parameter 8 and leaf parameter
L: a leaf owns a block of L/2..2L consecutive positions, an internal node at
level l owns between (1/2)8^l L and 2*8^l L positions.  For every internal
node q, a candidate list (shared by all of q's children) records every
symbol that can be a majority of a range touching one child; the list covers
the window made of q's block and the blocks of q's two same-level neighbors.
Leaves additionally carry miniblock arenas at geometrically shrinking size
classes (medium levels for ranges between L' and L, beta sub-levels with
gamma-coded candidate chunks for smaller ranges with larger thresholds).

Queries dispatch on range size: big ranges walk to the right tree level and
verify that level's candidate list by rank counting; mid-size ranges use the
leaf's medium miniblocks; small ranges with threshold beta use the beta
sub-levels routed through a per-leaf B-tree; everything smaller is answered
by extracting the range and counting directly.  Candidate verification scans
count-descending lists and stops early once a computed count falls below
beta*r - gamma, where gamma bounds the count drift since the last rebuild.

All thresholds are exact rationals (Fraction); "majority" always means
strictly more than threshold * range length occurrences.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction

import numpy as np

from .arena import RouteTree, SlotArena
from .errors import (
    LevelUnavailable,
    PositionOutOfRange,
    ThresholdBelowBuildAlpha,
    ThresholdOutOfRange,
)
from .gamma import encode_chunks, scan_chunks
from .params import IndexParams, ceil_frac, size_class
from .partial_sum import PartialSumSeq
from .sequence import DynamicSequence


class _Node:
    __slots__ = ("level", "length", "parent", "cidx", "children", "left",
                 "right", "child_cand", "child_ucnt", "own_cand", "own_ucnt",
                 "qsum", "plist", "marena", "beta", "buf")

    def __init__(self, level, length=0):
        self.level = level
        self.length = length
        self.parent = None
        self.cidx = 0
        self.children = None        # None marks a leaf
        self.left = None
        self.right = None
        self.child_cand = None      # shared candidate list for the children
        self.child_ucnt = 0
        self.own_cand = None        # root only: candidates for the root level
        self.own_ucnt = 0
        self.qsum = None            # marked levels: partial sums over plist
        self.plist = None
        self.marena = None          # leaves: medium miniblock arena
        self.beta = None            # leaves: [(SlotArena, RouteTree)] per level
        self.buf = None             # leaves: plain symbol list for the block

    @property
    def is_leaf(self):
        return self.children is None


class MajorityIndex:
    """Range majority/beta-majority index over a DynamicSequence."""

    def __init__(self, seq: DynamicSequence, alpha, stride_override=None,
                 safety_checks=False):
        self.seq = seq
        self.sigma = seq.sigma
        alpha = Fraction(alpha)
        if not 0 < alpha < 1:
            raise ThresholdOutOfRange(f"build threshold {alpha} not in (0,1)")
        self.alpha = alpha
        self.stride_override = stride_override
        self.safety_checks = safety_checks
        self.stop_rule_violations = []
        self.stats = Counter()
        self.params = None
        self.root = None
        self._build_derived()

    @classmethod
    def build(cls, symbols, alpha, sigma, **kw) -> "MajorityIndex":
        seq = DynamicSequence.from_array(np.asarray(symbols, dtype=np.int64), sigma)
        return cls(seq, alpha, **kw)

    @property
    def n(self):
        return self.seq.length

    # ==================================================================
    # construction

    def _build_derived(self):
        n = self.seq.length
        self.params = IndexParams.for_n(n, self.sigma, self.alpha,
                                        self.stride_override)
        self.root = None
        p = self.params
        if n < p.L:
            return
        # Leaf blocks of ~(3/2)L, then bottom-up grouping by 8.
        target = max(1, (3 * p.L) // 2)
        nb = max(1, round(n / target))
        while n > nb * (2 * p.L - 1):
            nb += 1
        while nb > 1 and n < nb * p.L:
            nb -= 1
        base, rem = divmod(n, nb)
        lengths = [base + 1] * rem + [base] * (nb - rem)
        level_nodes = [_Node(0, ln) for ln in lengths]
        syms = self.seq.to_array().tolist()
        pos = 0
        for nd in level_nodes:
            nd.buf = syms[pos : pos + nd.length]
            pos += nd.length
        for a, b in zip(level_nodes, level_nodes[1:]):
            a.right = b
            b.left = a
        leaves = level_nodes
        level = 0
        while len(level_nodes) > 1 or level == 0:
            level += 1
            k = len(level_nodes)
            g = max(1, -(-k // 8))
            parents = []
            pos = 0
            for gi in range(g):
                take = k // g + (1 if gi < k % g else 0)
                kids = level_nodes[pos : pos + take]
                pos += take
                nd = _Node(level, sum(c.length for c in kids))
                nd.children = kids
                for ci, c in enumerate(kids):
                    c.parent = nd
                    c.cidx = ci
                parents.append(nd)
            for a, b in zip(parents, parents[1:]):
                a.right = b
                b.left = a
            level_nodes = parents
        self.root = level_nodes[0]
        for leaf in leaves:
            self._init_leaf_partitions(leaf)
        # Second pass: candidate lists everywhere (needs full structure).
        start = 1
        for leaf in leaves:
            self._rebuild_leaf_cands(leaf, start)
            start += leaf.length
        self._walk_internal(self.root, self._rebuild_child_cand)
        self._rebuild_own_cand()
        self._walk_internal(self.root, self._maybe_build_nav)

    def _walk_internal(self, node, fn):
        if node.is_leaf:
            return
        fn(node)
        for c in node.children:
            self._walk_internal(c, fn)

    def _init_leaf_partitions(self, leaf):
        """Create miniblock slots and routing trees (no candidate lists yet)."""
        p = self.params
        leaf.marena = SlotArena(len(p.med_sizes), p.arena_capacity())
        for l, m in enumerate(p.med_sizes):
            self._fill_level(leaf.marena, l, m, leaf.length)
        leaf.beta = []
        for l, m in enumerate(p.beta_sizes):
            arena = SlotArena(1, -(-4 * p.L // m))
            self._fill_level(arena, 0, m, leaf.length)
            rtree = RouteTree(p.B)
            rtree.rebuild(arena, 0)
            leaf.beta.append((arena, rtree))

    @staticmethod
    def _fill_level(arena, level, m, total):
        k = max(1, total // m)
        base, rem = divmod(total, k)
        prev = None
        for j in range(k):
            idx = arena.alloc_after(level, prev)
            arena.slots[idx].length = base + (1 if j < rem else 0)
            prev = idx

    # ------------------------------------------------------------------
    # candidate computation

    def _window_counts(self, lo, hi):
        if lo > hi:
            return {}
        if hi - lo + 1 <= 4 * self.sigma:
            arr = self.seq.extract(lo, hi)
            counts = np.bincount(arr, minlength=self.sigma + 1)
            return {int(s): int(c) for s, c in enumerate(counts) if c and s}
        return self.seq.range_counts(lo, hi)

    @staticmethod
    def _cand_list(counts, threshold):
        out = [(s, c) for s, c in counts.items() if c > threshold]
        out.sort(key=lambda sc: (-sc[1], sc[0]))
        return out

    def _cands_from_syms(self, syms, threshold):
        """(symbol, count) pairs with count > threshold, count-desc order."""
        cnts = np.bincount(np.asarray(syms, dtype=np.int64),
                           minlength=self.sigma + 1)
        thr = Fraction(threshold)
        least = thr.numerator // thr.denominator + 1
        out = [(int(s), int(cnts[s])) for s in np.nonzero(cnts >= least)[0]]
        out.sort(key=lambda sc: (-sc[1], sc[0]))
        return out

    @staticmethod
    def _gather_syms(node, out):
        if node.is_leaf:
            out.extend(node.buf)
        else:
            for c in node.children:
                MajorityIndex._gather_syms(c, out)

    def _slot_syms(self, leaf, arena, idx):
        """Symbols of the window pred(M) . M . succ(M), from leaf buffers."""
        s = arena.slots[idx]
        off = arena.start_of(idx)
        lo = off
        hi = off + s.length - 1
        head = tail = ()
        if arena.pred(idx) is not None:
            lo -= arena.slots[arena.pred(idx)].length
        else:
            nb = self._nbr_slot(leaf, arena, s.level, left=True)
            if nb is not None:
                head = nb[2].buf[-nb[0].slots[nb[1]].length :]
        if arena.succ(idx) is not None:
            hi += arena.slots[arena.succ(idx)].length
        else:
            nb = self._nbr_slot(leaf, arena, s.level, left=False)
            if nb is not None:
                tail = nb[2].buf[: nb[0].slots[nb[1]].length]
        mid = leaf.buf[lo - 1 : hi]
        if head or tail:
            return list(head) + mid + list(tail)
        return mid

    def _node_start(self, v):
        start = 1
        while v.parent is not None:
            par = v.parent
            for c in par.children[: v.cidx]:
                start += c.length
            v = par
        return start

    def _rebuild_child_cand(self, q):
        """Candidates shared by q's children: window is q's block plus the
        blocks of q's same-level neighbors, threshold alpha*b/2 for the
        child level."""
        p = self.params
        syms = []
        for v in (q.left, q, q.right):
            if v is not None:
                self._gather_syms(v, syms)
        thr = p.alpha_eff * p.b(q.level - 1) / 2
        q.child_cand = self._cands_from_syms(syms, thr)
        q.child_ucnt = 0

    def _rebuild_own_cand(self):
        root = self.root
        p = self.params
        syms = []
        self._gather_syms(root, syms)
        thr = p.alpha_eff * p.b(root.level) / 2
        root.own_cand = self._cands_from_syms(syms, thr)
        root.own_ucnt = 0

    def _maybe_build_nav(self, v):
        s = self.params.stride
        if v.level % s == 0 and v.level >= s:
            nodes = [v]
            for _ in range(s):
                nodes = [c for nd in nodes for c in nd.children]
            v.plist = nodes
            v.qsum = PartialSumSeq([nd.length for nd in nodes])
        else:
            v.plist = None
            v.qsum = None

    def _nav_ancestor(self, v):
        """Marked node whose navigation table lists v's level, if any."""
        if v.level % self.params.stride != 0:
            return None
        anc = v
        for _ in range(self.params.stride):
            anc = anc.parent
            if anc is None:
                return None
        return anc

    # slot-level candidate rebuilds ------------------------------------

    def _slot_window(self, leaf, leaf_start, arena, idx):
        """Absolute window pred(M) . M . succ(M) for a miniblock slot."""
        s = arena.slots[idx]
        off = arena.start_of(idx)
        lo = leaf_start + off - 1
        hi = lo + s.length - 1
        if arena.pred(idx) is not None:
            lo -= arena.slots[arena.pred(idx)].length
        else:
            nb = self._nbr_slot(leaf, arena, s.level, left=True)
            if nb is not None:
                lo -= nb[0].slots[nb[1]].length
        if arena.succ(idx) is not None:
            hi += arena.slots[arena.succ(idx)].length
        else:
            nb = self._nbr_slot(leaf, arena, s.level, left=False)
            if nb is not None:
                hi += nb[0].slots[nb[1]].length
        return lo, hi

    def _nbr_slot(self, leaf, arena, level, left):
        """Cross-leaf predecessor/successor miniblock: (arena, idx, leaf) or
        None when the neighbor leaf is absent."""
        nb_leaf = leaf.left if left else leaf.right
        if nb_leaf is None:
            return None
        nb_arena = self._matching_arena(nb_leaf, leaf, arena)
        idx = nb_arena.tail(level) if left else nb_arena.head(level)
        if idx is None:
            return None
        return nb_arena, idx, nb_leaf

    @staticmethod
    def _matching_arena(other_leaf, leaf, arena):
        if arena is leaf.marena:
            return other_leaf.marena
        for i, (a, _) in enumerate(leaf.beta):
            if a is arena:
                return other_leaf.beta[i][0]
        raise AssertionError("arena not attached to leaf")

    def _rebuild_med_cand(self, leaf, leaf_start, idx):
        p = self.params
        arena = leaf.marena
        s = arena.slots[idx]
        syms = self._slot_syms(leaf, arena, idx)
        thr = Fraction(p.alpha_eff * p.med_sizes[s.level], 4)
        s.cand = self._cands_from_syms(syms, thr)
        s.ucnt = 0

    def _rebuild_beta_cand(self, leaf, leaf_start, bl, idx):
        p = self.params
        arena = leaf.beta[bl][0]
        s = arena.slots[idx]
        syms = self._slot_syms(leaf, arena, idx)
        thr = Fraction(p.beta_alphas[bl] * p.beta_sizes[bl], 4)
        cands = self._cands_from_syms(syms, thr)
        s.cand = encode_chunks(cands, len(syms), p.beta_min_freq(bl))
        s.ucnt = 0

    def _rebuild_leaf_cands(self, leaf, leaf_start):
        for l in range(len(self.params.med_sizes)):
            for idx in list(leaf.marena.iter_level(l)):
                self._rebuild_med_cand(leaf, leaf_start, idx)
        for bl in range(len(self.params.beta_sizes)):
            arena = leaf.beta[bl][0]
            for idx in list(arena.iter_level(0)):
                self._rebuild_beta_cand(leaf, leaf_start, bl, idx)

    # ==================================================================
    # queries

    def query(self, l: int, r: int, beta=None):
        n = self.seq.length
        if l < 1 or r > n or l > r:
            raise PositionOutOfRange(f"range {l}..{r} not in 1..{n}")
        p = self.params
        beta = p.alpha if beta is None else Fraction(beta)
        if not 0 < beta < 1:
            raise ThresholdOutOfRange(f"query threshold {beta} not in (0,1)")
        rlen = r - l + 1
        if beta * self.sigma <= 1:
            self.stats["queries_sigma"] += 1
            return {c for c in range(1, self.sigma + 1)
                    if self.seq.count_range(c, l, r) > beta * rlen}
        if beta < p.alpha_eff:
            raise ThresholdBelowBuildAlpha(
                f"threshold {beta} below build threshold {p.alpha_eff}")
        if self.root is None:
            self.stats["queries_small"] += 1
            return self._scan_range(l, r, beta)
        if rlen >= p.L:
            return self._query_large(l, r, beta)
        if rlen > p.Lp:
            return self._query_medium(l, r, beta)
        bl = p.beta_level(rlen)
        if (bl is not None and p.beta_alphas[bl] <= beta
                and rlen <= p.beta_sizes[bl] and beta * rlen >= p.Ls):
            return self._query_beta(l, r, beta, bl)
        self.stats["queries_small"] += 1
        return self._scan_range(l, r, beta)

    def _scan_range(self, l, r, beta):
        rlen = r - l + 1
        counts = self._window_counts(l, r)
        return {s for s, c in counts.items() if c > beta * rlen}

    def _query_large(self, l, r, beta):
        self.stats["queries_large"] += 1
        p = self.params
        lev = p.large_level(r - l + 1, self.root.level)
        v, _ = self.descend_to_level(l, lev)
        if v.parent is None:
            cands = v.own_cand
            wlo, whi = 1, self.seq.length
        else:
            q = v.parent
            cands = q.child_cand
            lo_node = q.left if q.left is not None else q
            hi_node = q.right if q.right is not None else q
            wlo = self._node_start(lo_node)
            whi = self._node_start(hi_node) + hi_node.length - 1
        return self.verify_candidates(cands, l, r, beta, p.tree_gamma(lev),
                                      (wlo, whi))

    def _query_medium(self, l, r, beta):
        p = self.params
        ml = p.med_level(r - l + 1)
        leaf, start = self.descend_to_level(l, 0)
        if ml is None or (r - l + 1) > p.med_sizes[ml]:
            self.stats["queries_small"] += 1
            return self._scan_range(l, r, beta)
        self.stats["queries_medium"] += 1
        idx, _, _ = leaf.marena.find(ml, l - start + 1)
        cands = leaf.marena.slots[idx].cand
        wlo, whi = self._slot_window(leaf, start, leaf.marena, idx)
        return self.verify_candidates(cands, l, r, beta, p.med_gamma(ml),
                                      (wlo, whi))

    def query_beta_sublevel(self, l, r, beta):
        """Answer a small-range beta-majority query through the beta
        sub-level structures; raises LevelUnavailable when no sub-level
        serves this (range length, beta) pair and the caller should fall
        back to extraction."""
        p = self.params
        beta = Fraction(beta)
        rlen = r - l + 1
        bl = p.beta_level(rlen)
        if (self.root is None or bl is None or rlen > p.beta_sizes[bl]
                or p.beta_alphas[bl] > beta):
            raise LevelUnavailable(
                f"no beta sub-level serves range length {rlen} at {beta}")
        return self._query_beta(l, r, beta, bl)

    def _query_beta(self, l, r, beta, bl):
        self.stats["queries_beta"] += 1
        p = self.params
        leaf, start = self.descend_to_level(l, 0)
        arena, rtree = leaf.beta[bl]
        idx, _ = rtree.find(l - start + 1)
        cc = arena.slots[idx].cand
        wlo, whi = self._slot_window(leaf, start, arena, idx)
        rlen = r - l + 1
        thr = beta * rlen
        gamma = p.beta_gamma(bl)
        seq = self.seq
        res = set()
        cur_q = None
        chunk_max = None  # max current *window* count in the finished chunk
        pending = []
        stopped = False
        for q, sym in scan_chunks(cc):
            if stopped:
                pending.append(sym)
                continue
            if q != cur_q:
                # Chunks are ordered by decreasing window frequency at build
                # time; once the best current window count of a whole chunk
                # sits below thr - gamma, no later symbol can reach thr.
                if chunk_max is not None and chunk_max <= thr - gamma:
                    stopped = True
                    self.stats["stop_events"] += 1
                    pending.append(sym)
                    continue
                cur_q = q
                chunk_max = None
            cnt = seq.rank(sym, r) - seq.rank(sym, l - 1)
            self.stats["verify_pairs"] += 1
            if cnt > thr:
                res.add(sym)
            wcnt = seq.rank(sym, whi) - seq.rank(sym, wlo - 1)
            chunk_max = wcnt if chunk_max is None else max(chunk_max, wcnt)
        if stopped and self.safety_checks:
            self._recount_skipped(pending, l, r, thr)
        return res

    def verify_candidates(self, cands, l, r, beta, gamma, window=None):
        """Scan a frequency-ordered (symbol, stale count) list for the
        beta-majorities of [l, r], with the early-stop drift rule.

        A candidate's answer count is its count in [l, r].  The stop test
        compares against counts over *window*, the region the list was
        ordered over (default: the query range itself): once a candidate's
        current window count falls below beta*r - gamma, no later candidate
        can reach beta*r, because the ordering is by window count at build
        time and counts drift by less than gamma between rebuilds.  Range
        counts alone are not comparable across the ordering, so the window
        count is checked (lazily) before stopping.
        """
        wlo, whi = (l, r) if window is None else window
        seq = self.seq
        rlen = r - l + 1
        thr = beta * rlen
        res = set()
        for k, (sym, _stale) in enumerate(cands):
            cnt = seq.rank(sym, r) - seq.rank(sym, l - 1)
            self.stats["verify_pairs"] += 1
            if cnt > thr:
                res.add(sym)
            if cnt < thr - gamma:
                if (wlo, whi) != (l, r):
                    cnt = seq.rank(sym, whi) - seq.rank(sym, wlo - 1)
                if cnt < thr - gamma:
                    self.stats["stop_events"] += 1
                    if self.safety_checks:
                        self._recount_skipped(
                            [s for s, _ in cands[k + 1 :]], l, r, thr)
                    break
        return res

    def _recount_skipped(self, symbols, l, r, thr):
        for sym in symbols:
            cnt = self.seq.count_range(sym, l, r)
            self.stats["safety_recounts"] += 1
            if cnt > thr:
                self.stop_rule_violations.append((sym, l, r, cnt, thr))

    def descend_to_level(self, i: int, target: int):
        """Node at *target* level whose block contains position i, with the
        block's starting position.  Uses marked-level jump tables when the
        stride allows skipping levels."""
        if self.root is None or i < 1 or i > self.seq.length:
            raise PositionOutOfRange(f"position {i} not in 1..{self.seq.length}")
        s = self.params.stride
        cur = self.root
        start = 1
        rel = i
        while cur.level > target:
            if cur.qsum is not None and cur.level - s >= target:
                k = cur.qsum.search(rel)
                skip = cur.qsum.sum(k - 1)
                start += skip
                rel -= skip
                cur = cur.plist[k - 1]
                continue
            for c in cur.children:
                if rel <= c.length:
                    cur = c
                    break
                rel -= c.length
                start += c.length
            else:  # pragma: no cover - lengths always cover rel
                raise AssertionError("length bookkeeping drift")
        return cur, start

    # ==================================================================
    # updates

    def insert(self, c: int, i: int) -> None:
        self.seq.insert(i, c)
        self.notify_insert(c, i)

    def delete(self, i: int) -> int:
        c = self.seq.delete(i)
        self.notify_delete(i, c)
        return c

    def notify_insert(self, c, i):
        self._notify_update(i, +1, c)

    def notify_delete(self, i, c):
        self._notify_update(i, -1, c)

    def _notify_update(self, i, delta, c):
        self.stats["updates"] += 1
        n = self.seq.length
        if size_class(n) != self.params.T:
            self._build_derived()
            return
        if self.root is None:
            if n >= self.params.L:
                self._build_derived()
            return
        if n < self.params.L:
            self._build_derived()
            return
        path, rels = self._walk_path(i, delta)
        self._update_nav(path, delta)
        leaf = path[-1]
        leaf_start = i - rels[-1] + 1
        if delta > 0:
            leaf.buf.insert(rels[-1] - 1, c)
        else:
            del leaf.buf[rels[-1] - 1]
        self._update_leaf_arenas(leaf, leaf_start, rels[-1], delta)
        self._bump_tree_counters(path)
        self._fix_structure(path)

    def _walk_path(self, i, delta):
        """Root-to-leaf walk adjusting recorded lengths by delta.

        For inserts, i may be old-length + 1 (append): the position falls
        through to the last child at every level."""
        path = []
        rels = []
        node = self.root
        rel = i
        while True:
            node.length += delta
            path.append(node)
            rels.append(rel)
            if node.is_leaf:
                return path, rels
            for c in node.children:
                if rel <= c.length:
                    node = c
                    break
                rel -= c.length
            else:
                node = node.children[-1]
                rel += node.length

    def _update_nav(self, path, delta):
        s = self.params.stride
        top = path[0].level
        for v in path:
            if v.qsum is None:
                continue
            w = path[top - (v.level - s)]
            if s == 1:
                k = w.cidx
            else:
                k = v.plist.index(w)
            v.qsum.update(k + 1, delta)

    # ------------------------------------------------------------------
    # leaf arena maintenance

    def _update_leaf_arenas(self, leaf, leaf_start, off, delta):
        p = self.params
        for ml, m in enumerate(p.med_sizes):
            arena = leaf.marena
            idx, _, _ = arena.find(ml, off)
            s = arena.slots[idx]
            s.length += delta
            if s.length >= 2 * m:
                self._split_slot(leaf, leaf_start, arena, idx, None, ml)
            elif s.length < m and not self._is_sole(arena, idx):
                self._merge_slot(leaf, leaf_start, arena, idx, None, ml)
            else:
                self._bump_slot_counters(leaf, leaf_start, arena, idx, None, ml)
        for bl, m in enumerate(p.beta_sizes):
            arena, rtree = leaf.beta[bl]
            idx, _ = rtree.find(off, delta)
            s = arena.slots[idx]
            s.length += delta
            if s.length >= 2 * m:
                self._split_slot(leaf, leaf_start, arena, idx, bl, None)
            elif s.length < m and not self._is_sole(arena, idx):
                self._merge_slot(leaf, leaf_start, arena, idx, bl, None)
            else:
                self._bump_slot_counters(leaf, leaf_start, arena, idx, bl, None)

    @staticmethod
    def _is_sole(arena, idx):
        s = arena.slots[idx]
        return s.prev < 0 and s.nxt < 0

    def _rebuild_slot(self, leaf, leaf_start, bl, idx):
        if bl is None:
            self._rebuild_med_cand(leaf, leaf_start, idx)
        else:
            self._rebuild_beta_cand(leaf, leaf_start, bl, idx)

    def _bump_slot_counters(self, leaf, leaf_start, arena, idx, bl, ml):
        """An update inside slot idx counts against idx and both sequence
        neighbors (their windows contain it)."""
        level = arena.slots[idx].level
        trigger = (self.params.med_trigger(ml) if bl is None
                   else self.params.beta_trigger(bl))
        targets = [(arena, idx, leaf, leaf_start)]
        for left in (True, False):
            same = arena.pred(idx) if left else arena.succ(idx)
            if same is not None:
                targets.append((arena, same, leaf, leaf_start))
                continue
            nb = self._nbr_slot(leaf, arena, level, left)
            if nb is not None:
                nb_arena, nb_idx, nb_leaf = nb
                nb_start = (leaf_start - nb_leaf.length if left
                            else leaf_start + leaf.length)
                targets.append((nb_arena, nb_idx, nb_leaf, nb_start))
        for t_arena, t_idx, t_leaf, t_start in targets:
            s = t_arena.slots[t_idx]
            s.ucnt += 1
            if s.ucnt >= trigger:
                self._rebuild_slot(t_leaf, t_start, bl, t_idx)

    def _slot_nbrs_for_rebuild(self, leaf, leaf_start, arena, idxs, level):
        """Rebuild candidates of idxs plus both sequence neighbors of the
        group (windows overlap the changed miniblocks)."""
        out = [(arena, i, leaf, leaf_start) for i in idxs]
        first, last = idxs[0], idxs[-1]
        pr = arena.pred(first)
        if pr is not None:
            out.append((arena, pr, leaf, leaf_start))
        else:
            nb = self._nbr_slot(leaf, arena, level, left=True)
            if nb is not None:
                out.append((nb[0], nb[1], nb[2], leaf_start - nb[2].length))
        sc = arena.succ(last)
        if sc is not None:
            out.append((arena, sc, leaf, leaf_start))
        else:
            nb = self._nbr_slot(leaf, arena, level, left=False)
            if nb is not None:
                out.append((nb[0], nb[1], nb[2], leaf_start + leaf.length))
        return out

    def _split_slot(self, leaf, leaf_start, arena, idx, bl, ml):
        s = arena.slots[idx]
        level = s.level
        half = s.length // 2
        new = arena.alloc_after(level, idx)
        arena.slots[new].length = s.length - half
        s.length = half
        if bl is not None:
            leaf.beta[bl][1].rebuild(arena, 0)
        for t_arena, t_idx, t_leaf, t_start in self._slot_nbrs_for_rebuild(
                leaf, leaf_start, arena, [idx, new], level):
            self._rebuild_slot(t_leaf, t_start, bl, t_idx)

    def _merge_slot(self, leaf, leaf_start, arena, idx, bl, ml):
        m = (self.params.med_sizes[ml] if bl is None
             else self.params.beta_sizes[bl])
        s = arena.slots[idx]
        level = s.level
        # Fold into the earlier of (idx, neighbor): prefer the predecessor.
        nbr = arena.pred(idx)
        if nbr is not None:
            keep, drop = nbr, idx
        else:
            keep, drop = idx, arena.succ(idx)
        arena.slots[keep].length += arena.slots[drop].length
        # Freeing may renumber another slot; resolve keep afterwards by
        # remembering its position via the linked list from the dropped slot.
        keep_is_last = keep == arena.used - 1
        arena.free(drop)
        if keep_is_last and drop != keep:
            keep = drop  # the former last slot was moved into the hole
        idxs = [keep]
        if arena.slots[keep].length >= 2 * m:
            half = arena.slots[keep].length // 2
            new = arena.alloc_after(level, keep)
            arena.slots[new].length = arena.slots[keep].length - half
            arena.slots[keep].length = half
            idxs = [keep, new]
        if bl is not None:
            leaf.beta[bl][1].rebuild(arena, 0)
        for t_arena, t_idx, t_leaf, t_start in self._slot_nbrs_for_rebuild(
                leaf, leaf_start, arena, idxs, level):
            self._rebuild_slot(t_leaf, t_start, bl, t_idx)

    # ------------------------------------------------------------------
    # tree counters and structure

    def _bump_tree_counters(self, path):
        p = self.params
        for v in path:
            if v.is_leaf:
                continue
            trigger = p.tree_trigger(v.level - 1)
            for q in (v.left, v, v.right):
                if q is None:
                    continue
                q.child_ucnt += 1
                if q.child_ucnt >= trigger:
                    self._rebuild_child_cand(q)
        root = self.root
        root.own_ucnt += 1
        if root.own_ucnt >= p.tree_trigger(root.level):
            self._rebuild_own_cand()

    def _overflows(self, v):
        p = self.params
        if v.is_leaf:
            return v.length > 2 * p.L
        return v.length >= 2 * 8**v.level * p.L

    def _underflows(self, v):
        p = self.params
        if v.is_leaf:
            # Leaves stay at length >= L so that every miniblock size class
            # fits: slots then always have length in [m, 2m), which the
            # window-coverage argument of medium/beta queries relies on.
            return v.length < p.L
        return 2 * v.length <= 8**v.level * p.L

    def _fix_structure(self, path):
        for v in reversed(path):
            if v.parent is None:
                if self._overflows(v) and not v.is_leaf:
                    self._split_node(v)
                continue
            if self._overflows(v):
                self._split_node(v)
            elif self._underflows(v):
                self._merge_node(v)
        self._collapse_root()

    def _collapse_root(self):
        while (self.root is not None and not self.root.is_leaf
               and len(self.root.children) == 1
               and not self.root.children[0].is_leaf):
            self.root = self.root.children[0]
            self.root.parent = None
            self.root.cidx = 0
            self._rebuild_own_cand()

    def _split_node(self, u):
        lvl = u.level
        u2 = _Node(lvl)
        if u.is_leaf:
            half = u.length // 2
            u2.length = u.length - half
            u.length = half
            u2.children = None
            u2.buf = u.buf[half:]
            u.buf = u.buf[:half]
        else:
            weights = [c.length for c in u.children]
            total = sum(weights)
            cut, acc = 1, weights[0]
            while cut < len(weights) - 1 and acc + weights[cut] <= total // 2:
                acc += weights[cut]
                cut += 1
            if len(weights) >= 4:
                cut = max(2, min(cut, len(weights) - 2))
            u2.children = u.children[cut:]
            u.children = u.children[:cut]
            u.length = sum(c.length for c in u.children)
            u2.length = sum(c.length for c in u2.children)
            for ci, c in enumerate(u2.children):
                c.parent = u2
                c.cidx = ci
        u2.left = u
        u2.right = u.right
        if u.right is not None:
            u.right.left = u2
        u.right = u2
        par = u.parent
        if par is None:
            par = _Node(lvl + 1, u.length + u2.length)
            par.children = [u, u2]
            u.parent = u2.parent = par
            u.cidx, u2.cidx = 0, 1
            u.own_cand = None
            self.root = par
            self._rebuild_own_cand()
            self._rebuild_child_cand(par)
            self._maybe_build_nav(par)
        else:
            u2.parent = par
            par.children.insert(u.cidx + 1, u2)
            for ci in range(u.cidx + 1, len(par.children)):
                par.children[ci].cidx = ci
        if u.is_leaf:
            self._after_leaf_structure_change([u, u2])
        else:
            for q in (u.left, u, u2, u2.right):
                if q is not None and not q.is_leaf:
                    self._rebuild_child_cand(q)
            self._maybe_build_nav(u)
            self._maybe_build_nav(u2)
        anc = self._nav_ancestor(u)
        if anc is not None:
            self._maybe_build_nav(anc)

    def _merge_node(self, u):
        par = u.parent
        if par is None or len(par.children) < 2:
            return
        if u.cidx > 0:
            left, right = par.children[u.cidx - 1], u
        else:
            left, right = u, par.children[u.cidx + 1]
        lvl = u.level
        if left.is_leaf:
            left.length += right.length
            left.buf = left.buf + right.buf
        else:
            for c in right.children:
                c.parent = left
            left.children.extend(right.children)
            for ci, c in enumerate(left.children):
                c.cidx = ci
            left.length += right.length
        left.right = right.right
        if right.right is not None:
            right.right.left = left
        par.children.remove(right)
        for ci, c in enumerate(par.children):
            c.cidx = ci
        if self._overflows(left):
            self._split_node(left)
        else:
            if left.is_leaf:
                self._after_leaf_structure_change([left])
            else:
                for q in (left.left, left, left.right):
                    if q is not None and not q.is_leaf:
                        self._rebuild_child_cand(q)
                self._maybe_build_nav(left)
            anc = self._nav_ancestor(left)
            if anc is not None:
                self._maybe_build_nav(anc)

    def _after_leaf_structure_change(self, leaves):
        """Rebuild partitions and candidates of changed leaves, and refresh
        the boundary miniblocks of the adjacent leaves (their windows cross
        the leaf boundary)."""
        p = self.params
        for leaf in leaves:
            self._init_leaf_partitions(leaf)
        for leaf in leaves:
            self._rebuild_leaf_cands(leaf, self._node_start(leaf))
        outer = []
        lf = leaves[0].left
        if lf is not None and lf not in leaves:
            outer.append((lf, False))
        rt = leaves[-1].right
        if rt is not None and rt not in leaves:
            outer.append((rt, True))
        for nb, is_right in outer:
            nb_start = self._node_start(nb)
            for ml in range(len(p.med_sizes)):
                idx = nb.marena.head(ml) if is_right else nb.marena.tail(ml)
                if idx is not None:
                    self._rebuild_med_cand(nb, nb_start, idx)
            for bl in range(len(p.beta_sizes)):
                arena = nb.beta[bl][0]
                idx = arena.head(0) if is_right else arena.tail(0)
                if idx is not None:
                    self._rebuild_beta_cand(nb, nb_start, bl, idx)

    # ==================================================================
    # audits

    def audit(self, arr=None):
        """Verify every structural and candidate-completeness invariant.

        Raises AssertionError on the first violation.  *arr* may carry a
        pre-extracted numpy copy of the sequence to speed up counting.
        """
        p = self.params
        n = self.seq.length
        assert size_class(n) == p.T, "stale size class"
        if self.root is None:
            assert n < p.L
            return
        if arr is None:
            arr = self.seq.to_array()
        assert len(arr) == n

        def counts(lo, hi):
            return np.bincount(arr[lo - 1 : hi], minlength=self.sigma + 1)

        def complete(cand_syms, lo, hi, thr):
            thr = Fraction(thr)
            c = counts(lo, hi).astype(np.int64)
            heavy = np.flatnonzero(c * thr.denominator > thr.numerator)
            for sym in heavy.tolist():
                assert sym in cand_syms, (
                    f"missing candidate {sym} in window {lo}..{hi}")

        # Pass 1: structure.
        leaves = []
        level_first = {}

        def rec(v, start, is_root):
            level_first.setdefault(v.level, v)
            if v.is_leaf:
                assert p.L <= v.length <= 2 * p.L
                assert v.buf == arr[start - 1 : start - 1 + v.length].tolist(), (
                    "leaf symbol cache out of sync")
                leaves.append((v, start))
                self._audit_leaf_structure(v)
                return
            assert v.length == sum(c.length for c in v.children)
            if not is_root:
                b2 = 8**v.level * p.L
                assert b2 < 2 * v.length < 4 * b2, (
                    f"level {v.level} weight {v.length} out of bounds")
                assert 2 <= len(v.children) <= 32
            else:
                assert 1 <= len(v.children) <= 32
            pos = start
            for ci, c in enumerate(v.children):
                assert c.parent is v and c.cidx == ci
                rec(c, pos, False)
                pos += c.length
            if v.qsum is not None:
                nodes = [v]
                for _ in range(p.stride):
                    nodes = [c for nd in nodes for c in nd.children]
                assert v.plist == nodes, "navigation list drift"
                assert v.qsum.to_list() == [nd.length for nd in nodes]

        rec(self.root, 1, True)
        # Neighbor chains per level.
        by_level = {}
        def collect(v):
            by_level.setdefault(v.level, []).append(v)
            if not v.is_leaf:
                for c in v.children:
                    collect(c)
        collect(self.root)
        for lvl, nodes in by_level.items():
            for a, b in zip(nodes, nodes[1:]):
                assert a.right is b and b.left is a, f"neighbor chain level {lvl}"
            assert nodes[0].left is None and nodes[-1].right is None

        # Pass 2: candidate completeness and size bounds.
        def check_node(v, start):
            if v.is_leaf:
                return
            lo_node = v.left if v.left is not None else v
            lo = self._node_start(lo_node)
            hi_node = v.right if v.right is not None else v
            hi = self._node_start(hi_node) + hi_node.length - 1
            syms = {s for s, _ in v.child_cand}
            assert len(syms) == len(v.child_cand)
            assert len(v.child_cand) <= ceil_frac(192 / p.alpha_eff)
            assert v.child_ucnt < p.tree_trigger(v.level - 1)
            complete(syms, lo, hi, p.alpha_eff * p.b(v.level - 1))
            pos = start
            for c in v.children:
                check_node(c, pos)
                pos += c.length

        check_node(self.root, 1)
        root = self.root
        syms = {s for s, _ in root.own_cand}
        complete(syms, 1, n, p.alpha_eff * p.b(root.level))

        for leaf, start in leaves:
            self._audit_leaf_cands(leaf, start, complete)

    def _audit_leaf_structure(self, leaf):
        p = self.params
        leaf.marena.audit(leaf.length, range(len(p.med_sizes)))
        for ml, m in enumerate(p.med_sizes):
            for idx in leaf.marena.iter_level(ml):
                ln = leaf.marena.slots[idx].length
                assert m <= ln < 2 * m, f"medium block {ln} vs [{m},{2*m})"
        for bl, m in enumerate(p.beta_sizes):
            arena, rtree = leaf.beta[bl]
            arena.audit(leaf.length, [0])
            for idx in arena.iter_level(0):
                ln = arena.slots[idx].length
                assert m <= ln < 2 * m, f"beta block {ln} vs [{m},{2*m})"
            rtree.audit(arena, 0)

    def _audit_leaf_cands(self, leaf, start, complete):
        p = self.params
        for ml, m in enumerate(p.med_sizes):
            arena = leaf.marena
            for idx in arena.iter_level(ml):
                s = arena.slots[idx]
                assert s.ucnt < p.med_trigger(ml)
                assert len(s.cand) <= ceil_frac(24 / p.alpha_eff)
                lo, hi = self._slot_window(leaf, start, arena, idx)
                complete({c for c, _ in s.cand}, lo, hi,
                         Fraction(p.alpha_eff * m, 2))
        for bl, m in enumerate(p.beta_sizes):
            arena = leaf.beta[bl][0]
            for idx in arena.iter_level(0):
                s = arena.slots[idx]
                assert s.ucnt < p.beta_trigger(bl)
                syms = {sym for _, sym in scan_chunks(s.cand)}
                assert len(syms) <= ceil_frac(24 / p.beta_alphas[bl])
                lo, hi = self._slot_window(leaf, start, arena, idx)
                complete(syms, lo, hi, Fraction(p.beta_alphas[bl] * m, 2))

    # ==================================================================
    # space accounting

    def aux_bits(self):
        """Modeled auxiliary space (everything except the sequence), in bits,
        broken down by component.  Field widths are level-local."""
        p = self.params
        out = {"tree": 0, "nav": 0, "arenas": 0, "beta": 0, "cache": 0}
        if self.root is None:
            return out

        def bits(x):
            return max(1, int(x).bit_length())

        node_count = 0

        def count_nodes(v):
            nonlocal node_count
            node_count += 1
            if not v.is_leaf:
                for c in v.children:
                    count_nodes(c)

        count_nodes(self.root)
        ptr = bits(node_count)
        slot_bits = (ceil_frac(24 / p.alpha_eff) * bits(self.sigma)
                     + bits(2 * p.L) + bits(max(1, p.L // 2))
                     + 2 * bits(p.arena_capacity()))

        def visit(v):
            w_len = bits(2 * 8**v.level * p.L)
            out["tree"] += w_len + 4 * ptr
            if not v.is_leaf:
                out["tree"] += len(v.children) * ptr
                w_cnt = bits(6 * 8**v.level * p.L)
                out["tree"] += bits(p.tree_trigger(v.level - 1))
                out["tree"] += len(v.child_cand) * (bits(self.sigma) + w_cnt)
                if v.qsum is not None:
                    out["nav"] += len(v.plist) * (ptr + w_len)
                for c in v.children:
                    visit(c)
                return
            out["arenas"] += len(v.marena.slots) * slot_bits
            out["cache"] += 2 * p.L * bits(self.sigma)
            for bl, m in enumerate(p.beta_sizes):
                arena, rtree = v.beta[bl]
                cap = bits(len(arena.slots))
                for i in arena.iter_level(0):
                    s = arena.slots[i]
                    out["beta"] += (bits(2 * m) + bits(p.beta_trigger(bl))
                                    + 2 * cap + s.cand.payload_bits())

                def rnode(nd):
                    out["beta"] += len(nd.kids) * (cap + bits(2 * p.L))
                    if not nd.is_bottom:
                        for k in nd.kids:
                            rnode(k)

                rnode(rtree.root)

        visit(self.root)
        root = self.root
        out["tree"] += len(root.own_cand) * (bits(self.sigma)
                                             + bits(self.seq.length + 1))
        return out
