"""Frequent-elements passes vs. brute-force counting."""

from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from majmin.errors import EmptyWindow
from majmin.frequent import exact_counts, misra_gries, scan_majorities, \
    streaming_candidates


def chars(s):
    return [ord(c) for c in s]


def test_misra_gries_examples():
    assert misra_gries(chars("aabab"), 2) == [(ord("a"), 3)]
    assert misra_gries(chars("abc"), 3) == []
    assert misra_gries(chars("aaaa"), 1) == [(ord("a"), 4)]
    with pytest.raises(EmptyWindow):
        misra_gries([], 1)


def test_exact_counts_examples():
    assert exact_counts(chars("aabab"), chars("ab")) == [(ord("a"), 3), (ord("b"), 2)]
    assert exact_counts([], [ord("a")]) == [(ord("a"), 0)]
    assert exact_counts(chars("zz"), [ord("a")]) == [(ord("a"), 0)]


def test_scan_majorities_examples():
    assert scan_majorities(chars("aabbbab"), Fraction(1, 2)) == {ord("b")}
    assert scan_majorities(chars("aabbbab"), Fraction(1, 3)) == {ord("a"), ord("b")}
    assert scan_majorities(chars("x"), Fraction(1, 2)) == {ord("x")}
    with pytest.raises(EmptyWindow):
        scan_majorities([], Fraction(1, 2))


def test_ordering_deterministic():
    # Equal counts break ties by ascending symbol.
    out = misra_gries([2, 1, 2, 1, 3], 1)
    assert out == [(1, 2), (2, 2)]


@given(st.lists(st.integers(min_value=1, max_value=12), min_size=1, max_size=2000),
       st.integers(min_value=1, max_value=50))
def test_streaming_superset_guarantee(window, theta):
    k = -(-len(window) // theta)
    survivors = streaming_candidates(window, k)
    assert len(survivors) <= k
    for sym, cnt in Counter(window).items():
        if cnt > theta:
            assert sym in survivors


@given(st.lists(st.integers(min_value=1, max_value=8), min_size=1, max_size=400),
       st.fractions(min_value=Fraction(1, 100), max_value=1))
def test_scan_majorities_matches_brute_force(window, beta):
    expect = {s for s, c in Counter(window).items() if c > beta * len(window)}
    got = scan_majorities(window, beta)
    assert got == expect
    assert len(got) < 1 / beta


@given(st.lists(st.integers(min_value=1, max_value=10), min_size=1, max_size=500),
       st.integers(min_value=1, max_value=30))
def test_misra_gries_exact(window, theta):
    expect = sorted(
        ((s, c) for s, c in Counter(window).items() if c > theta),
        key=lambda sc: (-sc[1], sc[0]))
    assert misra_gries(window, theta) == expect
    assert len(expect) <= -(-len(window) // theta)
