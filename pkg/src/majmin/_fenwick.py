"""Plain-list Fenwick (binary indexed tree) helpers.

Trees are stored as a list of length m+1 with slot 0 unused.  All callers
keep m small enough that rebuilding on structural change is cheap.
"""


def build(values):
    """Return a Fenwick list over *values* (0-based list of ints)."""
    m = len(values)
    tree = [0] * (m + 1)
    for idx in range(1, m + 1):
        tree[idx] += values[idx - 1]
        parent = idx + (idx & -idx)
        if parent <= m:
            tree[parent] += tree[idx]
    return tree


def update(tree, i, delta):
    """Add *delta* to entry i (1-based)."""
    m = len(tree) - 1
    while i <= m:
        tree[i] += delta
        i += i & -i


def prefix(tree, i):
    """Sum of entries 1..i."""
    total = 0
    while i > 0:
        total += tree[i]
        i -= i & -i
    return total


def search(tree, x):
    """Smallest i with prefix(i) >= x, assuming x >= 1 and x <= prefix(m).

    Returns (i, prefix(i-1)).
    """
    m = len(tree) - 1
    idx = 0
    acc = 0
    bit = 1 << (m.bit_length())
    while bit:
        nxt = idx + bit
        if nxt <= m and acc + tree[nxt] < x:
            idx = nxt
            acc += tree[nxt]
        bit >>= 1
    return idx + 1, acc
