"""Brute-force reference answers and empirical-entropy measurements.

Everything here counts symbols directly over plain Python sequences, sharing
no code with the index modules, so agreement between an index and these
functions is meaningful evidence of correctness.
"""

from __future__ import annotations

import math
from collections import Counter

from .errors import PositionOutOfRange


def _check_range(n, l, r):
    if l < 1 or r > n or l > r:
        raise PositionOutOfRange(f"range {l}..{r} not in 1..{n}")


def brute_majorities(symbols, l, r, beta):
    """All symbols occurring more than beta*(r-l+1) times in symbols[l..r]
    (1-based, inclusive)."""
    _check_range(len(symbols), l, r)
    window = r - l + 1
    counts = Counter(symbols[l - 1 : r])
    return {s for s, c in counts.items() if c > beta * window}


def brute_minority(symbols, l, r, alpha):
    """All symbols occurring at least once and at most alpha*(r-l+1) times
    in symbols[l..r] (1-based, inclusive)."""
    _check_range(len(symbols), l, r)
    window = r - l + 1
    counts = Counter(symbols[l - 1 : r])
    return {s for s, c in counts.items() if c <= alpha * window}


def entropy(symbols, k=0):
    """Empirical entropy in bits per symbol: order-0 symbol statistics for
    k = 0, otherwise the length-weighted order-0 entropy of each k-symbol
    context's successor distribution."""
    n = len(symbols)
    if k < 0:
        raise ValueError("order must be >= 0")
    if n <= k:
        raise ValueError(f"need more than {k} symbols, got {n}")
    if k == 0:
        counts = Counter(symbols)
        return sum(c * math.log2(n / c) for c in counts.values()) / n
    contexts = Counter()
    followers = {}
    for i in range(n - k):
        ctx = tuple(symbols[i : i + k])
        contexts[ctx] += 1
        followers.setdefault(ctx, Counter())[symbols[i + k]] += 1
    total_bits = 0.0
    for ctx, m in contexts.items():
        for c in followers[ctx].values():
            total_bits += c * math.log2(m / c)
    return total_bits / n
