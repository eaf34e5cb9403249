"""Per-leaf slot arenas for miniblock bookkeeping, plus the routing B-tree
used by the beta sub-levels.

An arena is a flat slot array whose live slots always occupy a prefix:
freeing a slot moves the last live slot into the hole and patches the
doubly-linked per-level lists.  Each level's list orders its miniblocks by
position within the leaf block.
"""

from __future__ import annotations

from .partial_sum import PartialSumSeq


class Slot:
    __slots__ = ("length", "ucnt", "cand", "prev", "nxt", "level")

    def __init__(self, level=0, length=0):
        self.level = level
        self.length = length
        self.ucnt = 0
        self.cand = None
        self.prev = -1
        self.nxt = -1


class SlotArena:
    """Prefix-compacted slot array with one doubly-linked list per level."""

    __slots__ = ("slots", "used", "heads", "tails", "capacity")

    def __init__(self, levels: int, capacity: int):
        self.slots = [Slot() for _ in range(capacity)]
        self.capacity = capacity
        self.used = 0
        self.heads = [-1] * levels
        self.tails = [-1] * levels

    def alloc_after(self, level: int, after: int | None) -> int:
        """New slot linked after *after* (None = new head of the level list)."""
        idx = self.used
        if idx == len(self.slots):
            self.slots.append(Slot())
        self.used += 1
        s = self.slots[idx]
        s.level = level
        s.length = 0
        s.ucnt = 0
        s.cand = None
        if after is None:
            s.prev = -1
            s.nxt = self.heads[level]
            if s.nxt >= 0:
                self.slots[s.nxt].prev = idx
            self.heads[level] = idx
            if self.tails[level] < 0:
                self.tails[level] = idx
        else:
            a = self.slots[after]
            s.prev = after
            s.nxt = a.nxt
            a.nxt = idx
            if s.nxt >= 0:
                self.slots[s.nxt].prev = idx
            else:
                self.tails[level] = idx
        return idx

    def free(self, idx: int) -> None:
        """Unlink slot idx; keep live slots in a prefix by moving the last one."""
        s = self.slots[idx]
        level = s.level
        if s.prev >= 0:
            self.slots[s.prev].nxt = s.nxt
        else:
            self.heads[level] = s.nxt
        if s.nxt >= 0:
            self.slots[s.nxt].prev = s.prev
        else:
            self.tails[level] = s.prev
        last = self.used - 1
        self.used = last
        if idx == last:
            return
        m = self.slots[last]
        t = self.slots[idx]
        t.level, t.length, t.ucnt, t.cand = m.level, m.length, m.ucnt, m.cand
        t.prev, t.nxt = m.prev, m.nxt
        if t.prev >= 0:
            self.slots[t.prev].nxt = idx
        else:
            self.heads[t.level] = idx
        if t.nxt >= 0:
            self.slots[t.nxt].prev = idx
        else:
            self.tails[t.level] = idx

    def pred(self, idx: int) -> int | None:
        p = self.slots[idx].prev
        return p if p >= 0 else None

    def succ(self, idx: int) -> int | None:
        n = self.slots[idx].nxt
        return n if n >= 0 else None

    def head(self, level: int) -> int | None:
        h = self.heads[level]
        return h if h >= 0 else None

    def tail(self, level: int) -> int | None:
        t = self.tails[level]
        return t if t >= 0 else None

    def iter_level(self, level: int):
        idx = self.heads[level]
        while idx >= 0:
            yield idx
            idx = self.slots[idx].nxt

    def count_level(self, level: int) -> int:
        return sum(1 for _ in self.iter_level(level))

    def find(self, level: int, offset: int):
        """Slot containing 1-based *offset* within the leaf, by list walk.

        Returns (idx, local_offset, slot_start).  Offsets past the end land
        in the last slot (append position).
        """
        idx = self.heads[level]
        start = 1
        while idx >= 0:
            s = self.slots[idx]
            if offset < start + s.length or s.nxt < 0:
                return idx, offset - start + 1, start
            start += s.length
            idx = s.nxt
        raise LookupError(f"level {level} has no slots")

    def start_of(self, idx: int) -> int:
        """1-based start offset of slot idx within the leaf block."""
        start = 1
        cur = self.heads[self.slots[idx].level]
        while cur != idx:
            start += self.slots[cur].length
            cur = self.slots[cur].nxt
        return start

    def audit(self, leaf_length: int, levels) -> None:
        assert 0 <= self.used <= len(self.slots)
        seen = 0
        for level in levels:
            total = 0
            prev = -1
            idx = self.heads[level]
            while idx >= 0:
                assert idx < self.used, "live slot outside compacted prefix"
                s = self.slots[idx]
                assert s.level == level
                assert s.prev == prev
                assert s.length >= 1
                total += s.length
                seen += 1
                prev = idx
                idx = s.nxt
            assert self.tails[level] == prev
            assert total == leaf_length, (
                f"level {level} lengths {total} != leaf {leaf_length}")
        assert seen == self.used, "free slot reachable or live slot orphaned"


class RouteNode:
    __slots__ = ("kids", "psum", "is_bottom")

    def __init__(self, kids, psum, is_bottom):
        self.kids = kids          # RouteNodes, or slot indices at the bottom
        self.psum = psum          # PartialSumSeq of subtree sizes in positions
        self.is_bottom = is_bottom


class RouteTree:
    """B-tree over one beta level's miniblocks, fanout in [B, 2B].

    Rebuilt from the arena's linked list whenever the miniblock count
    changes; position counts are maintained incrementally otherwise.
    """

    __slots__ = ("root", "B")

    def __init__(self, B: int):
        self.B = B
        self.root = RouteNode([], PartialSumSeq([]), True)

    def rebuild(self, arena: SlotArena, level: int) -> None:
        items = [(idx, arena.slots[idx].length) for idx in arena.iter_level(level)]
        if not items:
            self.root = RouteNode([], PartialSumSeq([]), True)
            return
        nodes = self._pack([i for i, _ in items], [w for _, w in items], True)
        while len(nodes) > 1:
            weights = [n.psum.total for n in nodes]
            nodes = self._pack(nodes, weights, False)
        self.root = nodes[0]

    def _pack(self, kids, weights, is_bottom):
        k = len(kids)
        g = max(1, -(-k // (2 * self.B)))
        out = []
        pos = 0
        for gi in range(g):
            take = k // g + (1 if gi < k % g else 0)
            out.append(RouteNode(kids[pos : pos + take],
                                 PartialSumSeq(weights[pos : pos + take]),
                                 is_bottom))
            pos += take
        return out

    def find(self, offset: int, delta: int = 0):
        """Slot index and local offset for 1-based *offset*; optionally add
        *delta* to every subtree size on the path."""
        node = self.root
        off = min(offset, max(1, node.psum.total))
        while True:
            i = node.psum.search(off)
            if delta:
                node.psum.update(i, delta)
            off -= node.psum.sum(i - 1)
            if node.is_bottom:
                return node.kids[i - 1], off
            node = node.kids[i - 1]

    def audit(self, arena: SlotArena, level: int) -> None:
        order = []

        def rec(node, is_root):
            assert len(node.kids) == len(node.psum)
            if not is_root:
                assert self.B <= len(node.kids) <= 2 * self.B, "routing fanout"
            else:
                assert len(node.kids) <= 2 * self.B
            for i, kid in enumerate(node.kids):
                if node.is_bottom:
                    assert node.psum.entry(i + 1) == arena.slots[kid].length
                    order.append(kid)
                else:
                    assert node.psum.entry(i + 1) == kid.psum.total
                    rec(kid, False)

        rec(self.root, True)
        assert order == list(arena.iter_level(level)), "routing order drift"
