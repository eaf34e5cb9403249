"""Exception types shared across the package."""


class MajMinError(Exception):
    """Base class for all errors raised by this package."""


class PositionOutOfRange(MajMinError, IndexError):
    """A 1-based position lies outside the valid range."""


class SymbolOutOfRange(MajMinError, ValueError):
    """A symbol lies outside the fixed alphabet 1..sigma."""


class OccurrenceNotFound(MajMinError, ValueError):
    """select(c, k) asked for more occurrences than exist."""


class EmptyRange(MajMinError, ValueError):
    """extract(i, j) called with i > j."""


class IndexOutOfRange(MajMinError, IndexError):
    """A partial-sum entry index lies outside 0..m."""


class ValueOutOfRange(MajMinError, ValueError):
    """search(x) called with x < 1 or x > total sum."""


class NegativeResult(MajMinError, ValueError):
    """update(i, delta) would drive an entry below zero."""


class EmptyWindow(MajMinError, ValueError):
    """A frequency scan was handed an empty window."""


class FrequencyBelowMinimum(MajMinError, ValueError):
    """A candidate's relative frequency is below the chunk encoding minimum."""


class TruncatedStream(MajMinError, ValueError):
    """A gamma-code stream ended mid code word."""


class MalformedStream(MajMinError, ValueError):
    """A chunk stream violates the documented format."""


class ThresholdBelowBuildAlpha(MajMinError, ValueError):
    """Query threshold is below the build threshold and above 1/sigma."""


class ThresholdOutOfRange(MajMinError, ValueError):
    """A query-time threshold lies outside (0, 1)."""


class LevelUnavailable(MajMinError, LookupError):
    """No beta sub-level fits the requested range; caller should fall back."""


class InvalidParameter(MajMinError, ValueError):
    """A harness/bench parameter is out of its documented domain."""
