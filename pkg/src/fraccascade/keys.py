"""Key domain shared by every catalog: finite 64-bit scalars plus two sentinels."""

import math
import numbers

__all__ = ["MINUS_INF", "PLUS_INF", "Sentinel", "check_key", "check_query"]

_INT64_MIN = -(1 << 63)
_INT64_MAX = (1 << 63) - 1


class Sentinel:
    """One of the two implicit catalog bounds.

    Sentinels compare below (``MINUS_INF``) or above (``PLUS_INF``) every
    finite key and are never stored in a catalog.
    """

    __slots__ = ("_name", "_sign")

    def __init__(self, name, sign):
        self._name = name
        self._sign = sign

    def __repr__(self):
        return self._name

    def __reduce__(self):
        return self._name

    def _rank(self, other):
        if isinstance(other, Sentinel):
            return other._sign
        return 0

    def __lt__(self, other):
        return self._sign < self._rank(other)

    def __le__(self, other):
        return self._sign <= self._rank(other)

    def __gt__(self, other):
        return self._sign > self._rank(other)

    def __ge__(self, other):
        return self._sign >= self._rank(other)

    def __eq__(self, other):
        return self is other

    def __hash__(self):
        return hash(self._name)


MINUS_INF = Sentinel("MINUS_INF", -1)
PLUS_INF = Sentinel("PLUS_INF", 1)


def check_key(value):
    """Normalize ``value`` into a storable key or raise ``ValueError``.

    Integers must fit in 64 bits; floats must be finite, and ``-0.0`` is
    folded onto ``0.0`` so the two compare and print identically.
    """
    if isinstance(value, Sentinel):
        raise ValueError(f"sentinel {value!r} cannot be stored in a catalog")
    if isinstance(value, bool):
        raise TypeError("bool is not a catalog key")
    if isinstance(value, numbers.Integral):
        value = int(value)
        if not _INT64_MIN <= value <= _INT64_MAX:
            raise ValueError(f"integer key {value} does not fit in 64 bits")
        return value
    if isinstance(value, numbers.Real):
        value = float(value)
        if math.isnan(value):
            raise ValueError("NaN is not a catalog key")
        if math.isinf(value):
            raise ValueError("infinite keys collide with the sentinels")
        return value + 0.0
    raise TypeError(f"unsupported key type {type(value).__name__}")


def check_query(x):
    """Validate a search value; infinities are allowed, NaN is not."""
    if isinstance(x, Sentinel):
        raise ValueError("search values must be numbers, not sentinels")
    if isinstance(x, float) and math.isnan(x):
        raise ValueError("cannot search for NaN")
    return x
