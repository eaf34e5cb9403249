"""Derived block-length parameters: formula evaluations and level selection."""

from fractions import Fraction

from majmin.params import IndexParams, btree_fanout, marked_stride, size_class


def test_size_class_values():
    assert size_class(2**16) == 4
    assert size_class(2**14) == 4
    assert size_class(2**17) == 5
    assert size_class(2**20) == 5
    assert size_class(1) == 1
    assert size_class(3) == 1


def test_block_length_family_n16():
    p = IndexParams.for_n(2**16, sigma=4, alpha=Fraction(1, 4))
    assert (p.T, p.L, p.Lp, p.Ls) == (4, 64, 16, 4)
    assert p.med_sizes == (64, 32)
    assert p.beta_sizes == (16, 8, 4)
    assert p.beta_alphas == (Fraction(1, 4), Fraction(1, 2), Fraction(1, 1))


def test_block_length_family_n20():
    p = IndexParams.for_n(2**20, sigma=26, alpha=Fraction(1, 8))
    assert (p.T, p.L, p.Lp, p.Ls) == (5, 200, 40, 5)
    assert p.med_sizes == (200, 100, 50)
    assert p.beta_sizes == (40, 20, 10, 5)


def test_alpha_clamping():
    p = IndexParams.for_n(2**16, sigma=4, alpha=Fraction(1, 10))
    assert p.alpha_eff == Fraction(1, 4)
    p = IndexParams.for_n(2**16, sigma=2, alpha=Fraction(9, 10))
    assert p.alpha_eff == Fraction(1, 2)


def test_monotone_family():
    for n_exp in (10, 14, 17, 20):
        p = IndexParams.for_n(2**n_exp, sigma=26, alpha=Fraction(1, 8))
        assert p.L >= p.Lp >= p.Ls >= 1
        assert all(a <= b for a, b in zip(p.med_sizes[1:], p.med_sizes))
        assert all(a <= b for a, b in zip(p.beta_sizes[1:], p.beta_sizes))
        assert p.beta_alphas[-1] <= 1


def test_level_selection():
    p = IndexParams.for_n(2**16, sigma=4, alpha=Fraction(1, 4))
    # Large: level with b_l < r <= b_{l+1}.
    assert p.large_level(1024, top=5) == 1
    assert p.b(1) == 256 and p.b(2) == 2048
    # Medium: smallest level with m_l/2 <= r < m_l.
    lvl = p.med_level(20)
    assert lvl == 1 and p.med_sizes[lvl] == 32
    assert p.med_sizes[lvl] // 2 <= 20 < p.med_sizes[lvl]
    # Beta: halving sizes below L'.
    assert p.beta_level(3) == 2
    assert p.beta_level(1) is None


def test_triggers_positive():
    p = IndexParams.for_n(2**14, sigma=256, alpha=Fraction(1, 16))
    assert all(p.med_trigger(l) >= 1 for l in range(len(p.med_sizes)))
    assert all(p.beta_trigger(l) >= 1 for l in range(len(p.beta_sizes)))
    assert p.tree_trigger(0) >= 1
    assert p.tree_gamma(1) == p.alpha_eff * p.b(1) / 2


def test_stride_and_fanout():
    assert marked_stride(2**16) == 1
    assert btree_fanout(2**16) == 4
    assert btree_fanout(2) == 2
