"""Elias gamma coding and the quantized-frequency chunk stream.

A chunk stream groups candidate symbols by quantized relative frequency
q_f = ceil(lg(window_len / count)).  Chunks appear in ascending q_f order
(most frequent first); inside a chunk, symbols are strictly increasing and
delta-encoded (first symbol raw, then positive gaps); the code of 0 closes
each chunk.  Every q_f slot up to q_max is present, empty or not, so no
chunk-count header is needed.

All code words are gamma codes of x+1 so that x = 0 is encodable ("1") and
doubles as the chunk terminator.  Bits are MSB-first within a code word.
"""

from __future__ import annotations

from .errors import FrequencyBelowMinimum, MalformedStream, TruncatedStream


class GammaStream:
    """Append-only bit buffer with a read cursor.

    Bits live in a single int; bit i of the stream (0-based, in emission
    order) is bit i of the int.  Code words are emitted MSB-first.
    """

    __slots__ = ("bits", "length", "cursor")

    def __init__(self, bits: int = 0, length: int = 0):
        self.bits = bits
        self.length = length
        self.cursor = 0

    def write_bits(self, value: int, width: int) -> None:
        """Append the low *width* bits of value, MSB first."""
        for k in range(width - 1, -1, -1):
            self.bits |= ((value >> k) & 1) << self.length
            self.length += 1

    def read_bit(self) -> int:
        if self.cursor >= self.length:
            raise TruncatedStream("read past end of stream")
        bit = (self.bits >> self.cursor) & 1
        self.cursor += 1
        return bit

    def at_end(self) -> bool:
        return self.cursor >= self.length

    def rewind(self) -> None:
        self.cursor = 0

    def to_bitstring(self) -> str:
        return "".join(str((self.bits >> i) & 1) for i in range(self.length))

    @classmethod
    def from_bitstring(cls, s: str) -> "GammaStream":
        st = cls()
        for ch in s:
            st.bits |= (1 if ch == "1" else 0) << st.length
            st.length += 1
        return st


_CODE_CACHE: dict = {}


def _code_of(x: int):
    """(bit pattern in stream order, total width) of the gamma code of x+1."""
    cached = _CODE_CACHE.get(x)
    if cached is None:
        v = x + 1
        w = v.bit_length()
        rev = 0
        for k in range(w):
            rev |= ((v >> k) & 1) << (w - 1 - k)
        cached = (rev << (w - 1), 2 * w - 1)
        if len(_CODE_CACHE) < 1 << 16:
            _CODE_CACHE[x] = cached
    return cached


def gamma_encode(stream: GammaStream, x: int) -> None:
    """Append the gamma code of x+1 (x >= 0)."""
    if x < 0:
        raise ValueError(f"gamma code domain is x >= 0, got {x}")
    pattern, width = _code_of(x)
    stream.bits |= pattern << stream.length
    stream.length += width


def gamma_encode_str(x: int) -> str:
    st = GammaStream()
    gamma_encode(st, x)
    return st.to_bitstring()


def gamma_decode(stream: GammaStream) -> int:
    """Read one gamma code word; returns x where the word is gamma(x+1)."""
    zeros = 0
    while stream.read_bit() == 0:
        zeros += 1
    v = 1
    for _ in range(zeros):
        v = (v << 1) | stream.read_bit()
    return v - 1


def quantized_frequency(window_len: int, count: int) -> int:
    """q_f = ceil(lg(window_len / count)), computed exactly on integers."""
    q = 0
    while (count << q) < window_len:
        q += 1
    return q


class ChunkedCandidates:
    """Immutable gamma-coded candidate list grouped by quantized frequency."""

    __slots__ = ("stream", "q_max")

    def __init__(self, stream: GammaStream, q_max: int):
        self.stream = stream
        self.q_max = q_max

    def payload_bits(self) -> int:
        return self.stream.length

    def __iter__(self):
        return scan_chunks(self)


def encode_chunks(candidates, window_len: int, min_freq) -> ChunkedCandidates:
    """Encode (symbol, count) pairs; min_freq is an exact rational lower bound.

    q_max = ceil(lg(1/min_freq)); every candidate must satisfy
    count/window_len >= min_freq.
    """
    num, den = min_freq.numerator, min_freq.denominator
    q_max = 0
    while num << q_max < den:
        q_max += 1
    groups: list[list[int]] = [[] for _ in range(q_max + 1)]
    for sym, count in candidates:
        if count * den < num * window_len:
            raise FrequencyBelowMinimum(
                f"symbol {sym} frequency {count}/{window_len} below {min_freq}")
        q = quantized_frequency(window_len, count)
        if q > q_max:
            # count/window_len >= min_freq guarantees q <= q_max.
            raise FrequencyBelowMinimum(
                f"symbol {sym} quantized frequency {q} exceeds q_max {q_max}")
        groups[q].append(sym)
    stream = GammaStream()
    for group in groups:
        group.sort()
        prev = 0
        for sym in group:
            gamma_encode(stream, sym - prev)
            prev = sym
        gamma_encode(stream, 0)
    return ChunkedCandidates(stream, q_max)


def scan_chunks(cc: ChunkedCandidates):
    """Yield (q_f, symbol) in ascending q_f, ascending symbol order."""
    stream = GammaStream(cc.stream.bits, cc.stream.length)
    for q in range(cc.q_max + 1):
        prev = 0
        while True:
            try:
                delta = gamma_decode(stream)
            except TruncatedStream:
                raise MalformedStream(f"chunk {q} not terminated") from None
            if delta == 0:
                break
            # Positive deltas make decoded values strictly increasing.
            value = prev + delta
            yield q, value
            prev = value
    if not stream.at_end():
        raise MalformedStream("trailing bits after final chunk")
