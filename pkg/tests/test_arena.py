"""Slot arenas (prefix compaction, per-level lists) and routing B-trees."""

import random

from majmin.arena import RouteTree, SlotArena


def lengths(arena, level):
    return [arena.slots[i].length for i in arena.iter_level(level)]


def test_alloc_chain_and_find():
    a = SlotArena(levels=1, capacity=4)
    first = a.alloc_after(0, None)
    a.slots[first].length = 5
    second = a.alloc_after(0, first)
    a.slots[second].length = 3
    assert lengths(a, 0) == [5, 3]
    assert a.find(0, 1) == (first, 1, 1)
    assert a.find(0, 5) == (first, 5, 1)
    assert a.find(0, 6) == (second, 1, 6)
    # Past-the-end offsets land in the last slot (append position).
    assert a.find(0, 9) == (second, 4, 6)
    assert a.start_of(second) == 6
    a.audit(8, [0])


def test_free_moves_last_slot_into_hole():
    a = SlotArena(levels=2, capacity=8)
    s0 = a.alloc_after(0, None)
    s1 = a.alloc_after(0, s0)
    s2 = a.alloc_after(1, None)
    for idx, ln in ((s0, 2), (s1, 3), (s2, 5)):
        a.slots[idx].length = ln
    a.free(s0)  # the level-1 slot (last allocated) moves into index 0
    assert a.used == 2
    assert lengths(a, 0) == [3]
    assert lengths(a, 1) == [5]
    # Live slots stay in the prefix [0, used).
    assert {a.head(0), a.head(1)} == {0, 1}


def test_insert_mid_list():
    a = SlotArena(levels=1, capacity=8)
    s0 = a.alloc_after(0, None)
    s1 = a.alloc_after(0, s0)
    mid = a.alloc_after(0, s0)
    for idx, ln in ((s0, 4), (mid, 1), (s1, 4)):
        a.slots[idx].length = ln
    assert lengths(a, 0) == [4, 1, 4]
    assert a.pred(mid) == s0 and a.succ(mid) == s1
    assert a.head(0) == s0 and a.tail(0) == s1


def test_randomized_model():
    rng = random.Random(5)
    a = SlotArena(levels=3, capacity=4)
    model = {0: [], 1: [], 2: []}  # per level: list of (key, length)
    key = 0
    keys = {}  # key -> slot index, updated as compaction moves slots
    for _ in range(600):
        level = rng.randrange(3)
        if model[level] and rng.random() < 0.4:
            pos = rng.randrange(len(model[level]))
            k, _ = model[level].pop(pos)
            victim = keys.pop(k)
            last = a.used - 1
            moved_key = next((kk for kk, ii in keys.items() if ii == last), None)
            a.free(victim)
            if moved_key is not None and victim != last:
                keys[moved_key] = victim
        else:
            pos = rng.randrange(len(model[level]) + 1)
            after = keys[model[level][pos - 1][0]] if pos else None
            idx = a.alloc_after(level, after)
            ln = rng.randint(1, 9)
            a.slots[idx].length = ln
            keys[key] = idx
            model[level].insert(pos, (key, ln))
            key += 1
        for lv in range(3):
            assert lengths(a, lv) == [ln for _, ln in model[lv]]
        assert a.used == sum(len(v) for v in model.values())


def build_route(items, B=2):
    a = SlotArena(levels=1, capacity=len(items) or 1)
    prev = None
    for ln in items:
        prev = a.alloc_after(0, prev)
        a.slots[prev].length = ln
    t = RouteTree(B)
    t.rebuild(a, 0)
    return a, t


def test_route_find():
    a, t = build_route([4, 2, 7, 1, 5, 3, 6, 2, 2])
    t.audit(a, 0)
    order = list(a.iter_level(0))
    start = 1
    for slot, ln in zip(order, [4, 2, 7, 1, 5, 3, 6, 2, 2]):
        for off in (start, start + ln - 1):
            got_slot, local = t.find(off)
            assert got_slot == slot and local == off - start + 1
        start += ln


def test_route_find_updates_sums():
    a, t = build_route([4, 4, 4, 4, 4])
    slot, local = t.find(7, delta=+1)
    a.slots[slot].length += 1
    assert local == 3
    t.audit(a, 0)
    slot, local = t.find(7, delta=-1)
    a.slots[slot].length -= 1
    t.audit(a, 0)


def test_route_fanout_bounds():
    for k in (1, 2, 5, 17, 64, 301):
        a, t = build_route([1] * k, B=3)
        t.audit(a, 0)  # audit asserts fanout in [B, 2B] below the root


def test_route_append_clamps():
    a, t = build_route([2, 2])
    slot, local = t.find(99, delta=+1)
    assert slot == list(a.iter_level(0))[-1]
    a.slots[slot].length += 1
    t.audit(a, 0)
