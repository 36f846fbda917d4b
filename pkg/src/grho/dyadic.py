"""Exact dyadic rationals m / 2**e.

Dyadic is the only scalar the PL machinery needs.  Arithmetic with another
Dyadic or an int stays dyadic; mixing with a ``fractions.Fraction`` falls back
to Fraction (needed for the occasional non-dyadic fixed point).
"""

from __future__ import annotations

from fractions import Fraction
import re

__all__ = ["Dyadic", "as_exact", "to_fraction", "parse_number", "DyadicError"]


class DyadicError(ValueError):
    pass


def _tz(n):
    return (n & -n).bit_length() - 1


class Dyadic:
    __slots__ = ("m", "e", "_hash")

    def __init__(self, m=0, e=0):
        if e < 0:
            m, e = m << -e, 0
        elif m == 0:
            e = 0
        elif e and not m & 1:
            s = min(_tz(m), e)
            m >>= s
            e -= s
        self.m = m
        self.e = e
        self._hash = None

    # -- construction -----------------------------------------------------

    @classmethod
    def coerce(cls, x):
        if isinstance(x, Dyadic):
            return x
        if isinstance(x, int):
            return cls(x, 0)
        if isinstance(x, Fraction):
            d = x.denominator
            if d & (d - 1):
                raise DyadicError(f"{x} is not dyadic")
            return cls(x.numerator, d.bit_length() - 1)
        if isinstance(x, str):
            return cls.parse(x)
        raise TypeError(f"cannot make a Dyadic from {type(x).__name__}")

    @classmethod
    def parse(cls, s):
        s = s.strip()
        if "/" in s:
            num, den = s.split("/")
            return cls.coerce(Fraction(int(num), int(den)))
        if re.fullmatch(r"[+-]?\d+", s):
            return cls(int(s))
        # decimal literals such as 0.375 are dyadic iff the fraction is
        return cls.coerce(Fraction(s))

    @classmethod
    def from_json(cls, obj):
        m, e = obj["m"], obj["e"]
        if not isinstance(m, int) or not isinstance(e, int) or e < 0:
            raise DyadicError(f"bad dyadic {obj!r}")
        return cls(m, e)

    def to_json(self):
        return {"m": self.m, "e": self.e}

    # -- arithmetic ---------------------------------------------------------

    def _align(self, other):
        if self.e >= other.e:
            return self.m, other.m << (self.e - other.e), self.e
        return self.m << (other.e - self.e), other.m, other.e

    def __add__(self, other):
        if isinstance(other, int):
            return Dyadic(self.m + (other << self.e), self.e)
        if isinstance(other, Dyadic):
            a, b, e = self._align(other)
            return Dyadic(a + b, e)
        if isinstance(other, Fraction):
            return self.to_fraction() + other
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            return Dyadic(self.m - (other << self.e), self.e)
        if isinstance(other, Dyadic):
            a, b, e = self._align(other)
            return Dyadic(a - b, e)
        if isinstance(other, Fraction):
            return self.to_fraction() - other
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, int):
            return Dyadic((other << self.e) - self.m, self.e)
        if isinstance(other, Fraction):
            return other - self.to_fraction()
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, int):
            return Dyadic(self.m * other, self.e)
        if isinstance(other, Dyadic):
            return Dyadic(self.m * other.m, self.e + other.e)
        if isinstance(other, Fraction):
            return self.to_fraction() * other
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return Dyadic(-self.m, self.e)

    def __pos__(self):
        return self

    def __abs__(self):
        return Dyadic(abs(self.m), self.e)

    def scale(self, j):
        """Multiply by 2**j (j may be negative)."""
        if j >= 0:
            if self.e >= j:
                return Dyadic(self.m, self.e - j)
            return Dyadic(self.m << (j - self.e), 0)
        return Dyadic(self.m, self.e - j)

    def half(self):
        return self.scale(-1)

    def __truediv__(self, other):
        # exact division only by powers of two; anything else leaves Z[1/2]
        if isinstance(other, int) and other > 0 and not other & (other - 1):
            return self.scale(-(other.bit_length() - 1))
        if isinstance(other, (int, Dyadic, Fraction)):
            return as_exact(self.to_fraction() / to_fraction(other))
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return as_exact(to_fraction(other) / self.to_fraction())
        return NotImplemented

    def __floor__(self):
        return self.m >> self.e

    def __ceil__(self):
        return -((-self.m) >> self.e)

    def floor(self):
        return self.m >> self.e

    def is_integer(self):
        return self.e == 0

    # -- comparison -----------------------------------------------------------

    def _cmp(self, other):
        if isinstance(other, int):
            a, b = self.m, other << self.e
        elif isinstance(other, Dyadic):
            a, b, _ = self._align(other)
        elif isinstance(other, Fraction):
            a = self.m * other.denominator
            b = other.numerator << self.e
        else:
            return None
        return (a > b) - (a < b)

    def __eq__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c == 0

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c >= 0

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.m) if self.e == 0 else hash(Fraction(self.m, 1 << self.e))
        return self._hash

    def __bool__(self):
        return self.m != 0

    # -- conversion -------------------------------------------------------------

    def to_fraction(self):
        return Fraction(self.m, 1 << self.e)

    def __float__(self):
        return self.m / (1 << self.e)

    def __repr__(self):
        return f"Dyadic({self})"

    def __str__(self):
        if self.e == 0:
            return str(self.m)
        return f"{self.m}/{1 << self.e}"

    def __reduce__(self):
        return (Dyadic, (self.m, self.e))


def to_fraction(x):
    if isinstance(x, Dyadic):
        return x.to_fraction()
    return Fraction(x)


def as_exact(x):
    """Dyadic when x lies in Z[1/2], otherwise a Fraction."""
    if isinstance(x, Dyadic):
        return x
    if isinstance(x, int):
        return Dyadic(x)
    x = Fraction(x)
    d = x.denominator
    if d & (d - 1):
        return x
    return Dyadic(x.numerator, d.bit_length() - 1)


def parse_number(s):
    """Parse "5/4", "-3", "0.375" into Dyadic (or Fraction if not dyadic)."""
    s = s.strip()
    if "/" in s:
        num, den = s.split("/")
        return as_exact(Fraction(int(num), int(den)))
    return as_exact(Fraction(s))
