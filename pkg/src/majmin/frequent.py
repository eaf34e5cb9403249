"""Frequent-elements passes over an extracted window.

A bounded-counter streaming pass finds a superset of every symbol occurring
more than a threshold number of times; an exact recount then filters and
orders the survivors.  Windows always fit in memory here.
"""

from __future__ import annotations

from collections import Counter

from .errors import EmptyWindow


def streaming_candidates(window, k: int):
    """One bounded-counter pass with k counters.

    Returns a superset of every symbol occurring more than len(window)/k
    times, as a set of at most k symbols.
    """
    counters: dict = {}
    for sym in window:
        sym = int(sym)
        if sym in counters:
            counters[sym] += 1
        elif len(counters) < k:
            counters[sym] = 1
        else:
            dead = [s for s, c in counters.items() if c == 1]
            for s in counters:
                counters[s] -= 1
            for s in dead:
                del counters[s]
    return set(counters)


def exact_counts(window, candidates):
    """Exact occurrence count of each candidate in window, input order kept."""
    counts = Counter(int(s) for s in window)
    return [(int(c), counts.get(int(c), 0)) for c in candidates]


def misra_gries(window, theta: int):
    """All symbols occurring strictly more than theta times in window.

    Returns a list of (symbol, exact count) sorted by count descending,
    ties broken by ascending symbol.  Two passes: a bounded-counter stream
    with ceil(len(window)/theta) counters, then an exact recount.
    """
    n = len(window)
    if n == 0:
        raise EmptyWindow("frequent-elements pass over an empty window")
    if theta < 1:
        raise ValueError(f"threshold count {theta} must be >= 1")
    k = -(-n // theta)
    cands = streaming_candidates(window, k)
    out = [(s, c) for s, c in exact_counts(window, sorted(cands)) if c > theta]
    out.sort(key=lambda sc: (-sc[1], sc[0]))
    return out


def scan_majorities(window, beta):
    """Exactly the symbols occurring more than beta*len(window) times.

    beta is a Fraction (or any exact rational) in (0, 1]; comparison is
    exact: count > beta * len(window).
    """
    n = len(window)
    if n == 0:
        raise EmptyWindow("majority scan over an empty window")
    if not 0 < beta <= 1:
        raise ValueError(f"threshold {beta} not in (0, 1]")
    counts = Counter(int(s) for s in window)
    return {s for s, c in counts.items() if c > beta * n}
