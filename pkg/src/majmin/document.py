"""Mutable document combining majority and minority indexes over one
sequence.

Both maintainers share a single DynamicSequence: each update mutates the
sequence once and then notifies each index so their auxiliary structures
stay in sync.
"""

from __future__ import annotations

import numpy as np

from .majority import MajorityIndex
from .minority import MinorityIndex
from .sequence import DynamicSequence


class Document:
    def __init__(self, symbols, alpha, sigma, *, safety_checks=False,
                 stride_override=None):
        self.seq = DynamicSequence.from_array(
            np.asarray(symbols, dtype=np.int64), sigma)
        self.majority = MajorityIndex(self.seq, alpha,
                                      stride_override=stride_override,
                                      safety_checks=safety_checks)
        self.minority = MinorityIndex(self.seq, alpha)

    @property
    def n(self):
        return self.seq.length

    @property
    def sigma(self):
        return self.seq.sigma

    @property
    def alpha(self):
        return self.minority.alpha

    def insert(self, c, i):
        self.seq.insert(i, c)
        self.majority.notify_insert(c, i)
        self.minority.notify_insert(c, i)

    def delete(self, i):
        c = self.seq.delete(i)
        self.majority.notify_delete(i, c)
        self.minority.notify_delete(i, c)
        return c

    def query_majority(self, l, r, beta=None):
        return self.majority.query(l, r, beta)

    def query_minority(self, l, r):
        return self.minority.query(l, r)

    def to_array(self):
        return self.seq.to_array()

    def audit(self):
        arr = self.seq.to_array()
        self.majority.audit(arr)
        self.minority.audit(arr)
