"""Exact dyadic rational times.

Every timestamp produced by the cascade simulator has the form p / 2**q.
:class:`DyadicTime` keeps that form normalized so that equality of values
is equality of fields, and so schedules can be compared bit-exactly.
"""

from __future__ import annotations

import re
from enum import Enum
from functools import total_ordering

__all__ = ["DyadicTime", "Ordering", "make_dyadic", "add", "compare",
           "to_decimal_string", "parse_dyadic", "ZERO", "ONE"]


class Ordering(Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def _trailing_zeros(n: int) -> int:
    return (n & -n).bit_length() - 1


@total_ordering
class DyadicTime:
    """Nonnegative number ``numerator / 2**exponent`` in lowest terms.

    Instances are immutable and hashable. Use :func:`make_dyadic` (or the
    constructor, which normalizes) to build one.
    """

    __slots__ = ("_num", "_exp")

    def __init__(self, numerator: int = 0, exponent: int = 0):
        if not isinstance(numerator, int) or not isinstance(exponent, int):
            raise TypeError("numerator and exponent must be integers")
        if numerator < 0 or exponent < 0:
            raise ValueError("dyadic times are nonnegative with a nonnegative exponent")
        if numerator == 0:
            exponent = 0
        elif exponent:
            shift = min(_trailing_zeros(numerator), exponent)
            numerator >>= shift
            exponent -= shift
        object.__setattr__(self, "_num", numerator)
        object.__setattr__(self, "_exp", exponent)

    def __setattr__(self, name, value):
        raise AttributeError("DyadicTime is immutable")

    @property
    def numerator(self) -> int:
        return self._num

    @property
    def exponent(self) -> int:
        return self._exp

    @classmethod
    def power_of_half(cls, k: int) -> DyadicTime:
        """Return 2**-k."""
        return cls(1, k)

    def __add__(self, other: DyadicTime) -> DyadicTime:
        if not isinstance(other, DyadicTime):
            return NotImplemented
        e = max(self._exp, other._exp)
        return DyadicTime((self._num << (e - self._exp)) + (other._num << (e - other._exp)), e)

    __radd__ = __add__

    def __mul__(self, k: int) -> DyadicTime:
        if not isinstance(k, int) or isinstance(k, bool):
            return NotImplemented
        if k < 0:
            raise ValueError("scalar must be nonnegative")
        return DyadicTime(self._num * k, self._exp)

    __rmul__ = __mul__

    def _cmp(self, other: DyadicTime) -> int:
        e = max(self._exp, other._exp)
        a = self._num << (e - self._exp)
        b = other._num << (e - other._exp)
        return (a > b) - (a < b)

    def __eq__(self, other):
        if not isinstance(other, DyadicTime):
            return NotImplemented
        return self._num == other._num and self._exp == other._exp

    def __lt__(self, other):
        if not isinstance(other, DyadicTime):
            return NotImplemented
        return self._cmp(other) < 0

    def __hash__(self):
        return hash((self._num, self._exp))

    def __repr__(self):
        return f"DyadicTime({self._num}, {self._exp})"

    def __str__(self):
        return f"{self._num}/2^{self._exp}"

    def canonical(self) -> str:
        """Canonical text form ``p/2^q`` used in trace files."""
        return str(self)

    def as_fraction_parts(self) -> tuple[int, int]:
        return self._num, 1 << self._exp


ZERO = DyadicTime(0, 0)
ONE = DyadicTime(1, 0)


def make_dyadic(numerator: int, exponent: int) -> DyadicTime:
    return DyadicTime(numerator, exponent)


def add(a: DyadicTime, b: DyadicTime) -> DyadicTime:
    return a + b


def compare(a: DyadicTime, b: DyadicTime) -> Ordering:
    return Ordering(a._cmp(b))


def to_decimal_string(a: DyadicTime, digits: int) -> str:
    """Decimal expansion of ``a`` with exactly ``digits`` fractional digits.

    A dyadic p/2^q has exactly q fractional decimal digits, so when
    ``digits >= exponent`` the result is exact; otherwise it is truncated.
    ``digits == 0`` yields the integer part alone.
    """
    if digits < 0:
        raise ValueError("digits must be nonnegative")
    whole, rem = divmod(a.numerator, 1 << a.exponent)
    if digits == 0:
        return str(whole)
    # rem / 2^q == rem * 5^q / 10^q
    frac = str(rem * 5 ** a.exponent).rjust(a.exponent, "0") if a.exponent else ""
    frac = (frac + "0" * digits)[:digits]
    return f"{whole}.{frac}"


def is_exact_at(a: DyadicTime, digits: int) -> bool:
    """True when ``to_decimal_string(a, digits)`` loses nothing."""
    return digits >= a.exponent


_CANON = re.compile(r"^\s*(\d+)\s*/\s*2\^(\d+)\s*$")


def parse_dyadic(text: str) -> DyadicTime:
    """Parse the canonical ``p/2^q`` form (a bare integer is also accepted)."""
    m = _CANON.match(text)
    if m:
        return DyadicTime(int(m.group(1)), int(m.group(2)))
    if text.strip().isdigit():
        return DyadicTime(int(text.strip()), 0)
    raise ValueError(f"not a canonical dyadic time: {text!r}")
