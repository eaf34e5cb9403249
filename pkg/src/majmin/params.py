"""Size-class parameters shared by the majority index levels.

All thresholds are exact rationals; comparisons against them are done with
Fraction arithmetic so no floating-point boundary cases exist.  The
controlling size class T = ceil(lg n / lg lg n) determines every derived
block length; structures are rebuilt only when T changes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction


def ceil_frac(x) -> int:
    """Ceiling of an exact rational (or int)."""
    f = Fraction(x)
    return -(-f.numerator // f.denominator)


def size_class(n: int) -> int:
    """T = ceil(lg n / lg lg n), clamped to 1 for tiny n."""
    if n < 4:
        return 1
    t = math.log2(n) / math.log2(math.log2(n))
    return math.ceil(round(t, 9))


def marked_stride(n: int) -> int:
    """Every s-th tree level carries navigation tables; s = ceil((1/6) lg lg n)."""
    if n < 4:
        return 1
    return max(1, math.ceil(round(math.log2(math.log2(n)) / 6, 9)))


def btree_fanout(n: int) -> int:
    """Routing fanout lower bound B = ceil(sqrt(lg n)), at least 2."""
    if n < 2:
        return 2
    return max(2, math.ceil(round(math.sqrt(math.log2(n)), 9)))


@dataclass(frozen=True)
class IndexParams:
    """Derived block-length family for one (n-size-class, sigma, alpha)."""

    sigma: int
    alpha: Fraction
    T: int
    stride: int
    B: int
    alpha_eff: Fraction = field(init=False)
    L: int = field(init=False)           # leaf parameter; large ranges are >= L
    Lp: int = field(init=False)          # L'; medium ranges are in (Lp, L)
    Ls: int = field(init=False)          # L*; smallest structured range scale
    med_sizes: tuple = field(init=False)     # m_l for medium levels -l
    beta_sizes: tuple = field(init=False)    # m_{l*} for beta sub-levels -l*
    beta_alphas: tuple = field(init=False)   # alpha_{l*} = alpha_eff * 2^{l*}

    def __post_init__(self):
        a = min(max(self.alpha, Fraction(1, self.sigma)), Fraction(1, 2))
        object.__setattr__(self, "alpha_eff", a)
        T = self.T
        object.__setattr__(self, "L", ceil_frac(Fraction(T * T, 1) / a))
        object.__setattr__(self, "Lp", ceil_frac(Fraction(T, 1) / a))
        object.__setattr__(self, "Ls", T)
        L, Lp, Ls = self.L, self.Lp, self.Ls
        # Medium levels -l, l = 0..d: block sizes m_l = ceil(L / 2^l), stopping
        # while m stays above Lp (medium path serves Lp < r < L).
        d = 0
        while L > (2 * Lp) << d:
            d += 1
        object.__setattr__(
            self, "med_sizes", tuple(-(-L // (1 << l)) for l in range(d + 1)))
        # Beta sub-levels -l*: sizes halve from Lp down toward Ls, with the
        # per-level threshold alpha_{l*} = alpha_eff * 2^{l*} capped at 1.
        d = 0
        while (Ls << (d + 1)) <= Lp and a * (1 << (d + 1)) <= 1:
            d += 1
        object.__setattr__(
            self, "beta_sizes", tuple(-(-Lp // (1 << l)) for l in range(d + 1)))
        object.__setattr__(
            self, "beta_alphas", tuple(a * (1 << l) for l in range(d + 1)))

    @classmethod
    def for_n(cls, n: int, sigma: int, alpha: Fraction,
              stride_override: int | None = None) -> "IndexParams":
        return cls(sigma=sigma, alpha=Fraction(alpha), T=size_class(n),
                   stride=stride_override or marked_stride(n), B=btree_fanout(n))

    # ------------------------------------------------------------------
    # level arithmetic

    def b(self, level: int) -> Fraction:
        """Weight lower-bound scale b_l = (1/2) 8^l L for tree level l."""
        return Fraction(8**level * self.L, 2)

    def tree_trigger(self, level: int) -> int:
        """Candidate-rebuild counter bound for children at tree level."""
        return max(1, ceil_frac(self.alpha_eff * self.b(level) / 2))

    def tree_gamma(self, level: int) -> Fraction:
        return self.alpha_eff * self.b(level) / 2

    def med_trigger(self, l: int) -> int:
        return max(1, ceil_frac(self.alpha_eff * self.med_sizes[l] / 4))

    def med_gamma(self, l: int) -> Fraction:
        return Fraction(self.alpha_eff * self.med_sizes[l], 4)

    def beta_trigger(self, l: int) -> int:
        return max(1, ceil_frac(self.beta_alphas[l] * self.beta_sizes[l] / 4))

    def beta_gamma(self, l: int) -> Fraction:
        return Fraction(self.beta_alphas[l] * self.beta_sizes[l], 4)

    def beta_min_freq(self, l: int) -> Fraction:
        return Fraction(self.beta_alphas[l], 24)

    def large_level(self, r: int, top: int) -> int:
        """Smallest tree level l with b_{l+1} >= r, clamped to [0, top]."""
        l = 0
        while 8 ** (l + 1) * self.L < 2 * r and l < top:
            l += 1
        return l

    def med_level(self, r: int):
        """Smallest medium level -l with m_l <= 2r, or None."""
        for l, m in enumerate(self.med_sizes):
            if m <= 2 * r:
                return l
        return None

    def beta_level(self, r: int):
        """Smallest beta sub-level -l* with m_{l*} <= 2r, or None."""
        for l, m in enumerate(self.beta_sizes):
            if m <= 2 * r:
                return l
        return None

    def arena_capacity(self) -> int:
        """Nominal slot count of a per-leaf medium arena."""
        return -(-4 * self.L // self.Lp)
