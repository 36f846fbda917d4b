"""Piecewise-linear homeomorphisms of compact intervals with dyadic breakpoints
and power-of-two slopes: Thompson's group F, its subgroup H (equal boundary
slopes) and F' (compact support in the open interval).

Maps act on the right, so ``f.then(g)`` is "first f, then g".
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import NamedTuple

from .dyadic import Dyadic, as_exact

__all__ = [
    "Interval",
    "PLHomeo",
    "PLError",
    "Flags",
    "identity",
    "then_compose",
    "invert",
    "classify",
    "germ",
    "transport",
    "flip",
    "dyadic_interpolate",
    "extend_to_homeo",
    "thompson_x",
    "default_nus",
    "log2_ratio",
]

ZERO = Dyadic(0)
ONE = Dyadic(1)


class PLError(ValueError):
    pass


def log2_ratio(num, den):
    """j with num/den == 2**j, for positive dyadics; PLError otherwise."""
    if num.m <= 0 or den.m <= 0:
        raise PLError(f"non-positive ratio {num}/{den}")
    a, b = num.m, den.m
    ta, tb = (a & -a).bit_length() - 1, (b & -b).bit_length() - 1
    if a >> ta != b >> tb:
        raise PLError(f"slope {num}/{den} is not a power of 2")
    return (ta - num.e) - (tb - den.e)


@dataclass(frozen=True)
class Interval:
    lo: Dyadic
    hi: Dyadic

    def __post_init__(self):
        object.__setattr__(self, "lo", Dyadic.coerce(self.lo))
        object.__setattr__(self, "hi", Dyadic.coerce(self.hi))
        if not self.lo < self.hi:
            raise PLError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def length(self):
        return self.hi - self.lo

    def contains(self, other):
        return self.lo <= other.lo and other.hi <= self.hi

    def strictly_contains(self, other):
        return self.lo < other.lo and other.hi < self.hi

    def __contains__(self, x):
        return self.lo <= x <= self.hi

    def to_json(self):
        return [self.lo.to_json(), self.hi.to_json()]

    @classmethod
    def from_json(cls, obj):
        return cls(Dyadic.from_json(obj[0]), Dyadic.from_json(obj[1]))

    def __str__(self):
        return f"[{self.lo}, {self.hi}]"


class PLHomeo:
    """Increasing PL map given by its nodes; canonical (collinear nodes merged).

    Domain is [xs[0], xs[-1]], range [ys[0], ys[-1]].  Equality is node
    equality, which is semantic equality because of canonicalization.
    """

    __slots__ = ("xs", "ys", "logs", "_hash")

    def __init__(self, nodes):
        xs, ys, logs = [], [], []
        for x, y in nodes:
            x, y = Dyadic.coerce(x), Dyadic.coerce(y)
            if xs:
                dx, dy = x - xs[-1], y - ys[-1]
                if dx.m <= 0:
                    raise PLError("x-coordinates must increase strictly")
                if dy.m <= 0:
                    raise PLError("map must be strictly increasing")
                j = log2_ratio(dy, dx)
                if logs and logs[-1] == j:
                    xs[-1], ys[-1] = x, y
                    continue
                logs.append(j)
            xs.append(x)
            ys.append(y)
        if len(xs) < 2:
            raise PLError("need at least two nodes")
        self.xs = tuple(xs)
        self.ys = tuple(ys)
        self.logs = tuple(logs)
        self._hash = None

    # -- basic data ------------------------------------------------------------

    @property
    def nodes(self):
        return list(zip(self.xs, self.ys))

    @property
    def domain(self):
        return Interval(self.xs[0], self.xs[-1])

    @property
    def range(self):
        return Interval(self.ys[0], self.ys[-1])

    def slopes(self):
        return [Dyadic(1).scale(j) for j in self.logs]

    def __eq__(self, other):
        if not isinstance(other, PLHomeo):
            return NotImplemented
        return self.xs == other.xs and self.ys == other.ys

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.xs, self.ys))
        return self._hash

    def __repr__(self):
        body = ", ".join(f"({x}, {y})" for x, y in zip(self.xs, self.ys))
        return f"PLHomeo([{body}])"

    def is_identity(self):
        return self.logs == (0,) and self.xs[0] == self.ys[0]

    # -- evaluation --------------------------------------------------------------

    def __call__(self, x):
        return self.evaluate(x)

    def evaluate(self, x):
        xs = self.xs
        if isinstance(x, int):
            x = Dyadic(x)
        if not (xs[0] <= x <= xs[-1]):
            raise PLError(f"{x} outside domain [{xs[0]}, {xs[-1]}]")
        i = bisect_right(xs, x) - 1
        if i == len(self.logs):
            return self.ys[-1]
        if isinstance(x, Dyadic):
            return (x - xs[i]).scale(self.logs[i]) + self.ys[i]
        return as_exact(self.ys[i].to_fraction()
                        + (Fraction(x) - xs[i].to_fraction()) * Fraction(2) ** self.logs[i])

    def preimage(self, y):
        ys = self.ys
        if not (ys[0] <= y <= ys[-1]):
            raise PLError(f"{y} outside range [{ys[0]}, {ys[-1]}]")
        i = bisect_right(ys, y) - 1
        if i == len(self.logs):
            return self.xs[-1]
        if isinstance(y, Dyadic):
            return (y - ys[i]).scale(-self.logs[i]) + self.xs[i]
        return as_exact(self.xs[i].to_fraction()
                        + (Fraction(y) - ys[i].to_fraction()) * Fraction(2) ** -self.logs[i])

    def segment_at(self, x, side):
        """Index of the segment on the given side ('left'/'right') of x, or None."""
        xs = self.xs
        if side == "right":
            if x >= xs[-1]:
                return None
            return bisect_right(xs, x) - 1
        if x <= xs[0]:
            return None
        return bisect_left(xs, x) - 1

    # -- structural helpers -----------------------------------------------------

    def restrict(self, lo, hi):
        """Restriction to [lo, hi] inside the domain."""
        lo, hi = Dyadic.coerce(lo), Dyadic.coerce(hi)
        inner = [(x, y) for x, y in zip(self.xs, self.ys) if lo < x < hi]
        return PLHomeo([(lo, self.evaluate(lo)), *inner, (hi, self.evaluate(hi))])

    def shifted(self, dx, dy):
        return PLHomeo([(x + dx, y + dy) for x, y in zip(self.xs, self.ys)])

    def fixed_pieces(self):
        """Closed pieces of the domain where the map is the identity.

        Returns a sorted list of (lo, hi) with lo <= hi; degenerate pieces are
        isolated fixed points and may be non-dyadic rationals.
        """
        out = []
        for i, j in enumerate(self.logs):
            x0, x1, y0, y1 = self.xs[i], self.xs[i + 1], self.ys[i], self.ys[i + 1]
            d0, d1 = y0 - x0, y1 - x1
            if j == 0:
                if d0.m == 0:
                    out.append((x0, x1))
                continue
            if d0.m == 0:
                out.append((x0, x0))
            elif d1.m == 0:
                pass  # picked up as the left end of the next segment (or below)
            elif (d0.m > 0) != (d1.m > 0):
                # y0 + s (t - x0) = t  =>  t = x0 + d0 / (1 - s)
                s = Fraction(2) ** j
                t = as_exact(x0.to_fraction() + d0.to_fraction() / (1 - s))
                out.append((t, t))
        if self.ys[-1] == self.xs[-1]:
            x = self.xs[-1]
            if not out or out[-1][1] != x:
                out.append((x, x))
        merged = []
        for lo, hi in out:
            if merged and merged[-1][1] >= lo:
                merged[-1] = (merged[-1][0], max(hi, merged[-1][1]))
            else:
                merged.append((lo, hi))
        return merged

    def support_closure(self):
        """Closure of {x : f(x) != x} as sorted closed intervals."""
        a, b = self.xs[0], self.xs[-1]
        pieces = [p for p in self.fixed_pieces() if p[0] < p[1]]
        out, cur = [], a
        for lo, hi in pieces:
            if lo > cur:
                out.append((cur, lo))
            cur = hi
        if cur < b:
            out.append((cur, b))
        return out

    # -- JSON --------------------------------------------------------------------

    def to_json(self):
        return {"nodes": [[x.to_json(), y.to_json()] for x, y in zip(self.xs, self.ys)]}

    @classmethod
    def from_json(cls, obj):
        return cls([(Dyadic.from_json(x), Dyadic.from_json(y)) for x, y in obj["nodes"]])


def identity(lo=0, hi=1):
    lo, hi = Dyadic.coerce(lo), Dyadic.coerce(hi)
    return PLHomeo([(lo, lo), (hi, hi)])


def then_compose(f, *gs):
    """x . then_compose(f, g) = (x . f) . g; the range of f must lie in the domain of g."""
    for g in gs:
        f = _then(f, g)
    return f


def _then(f, g):
    if not (g.xs[0] <= f.ys[0] and f.ys[-1] <= g.xs[-1]):
        raise PLError(f"range {f.range} of f is not inside domain {g.domain} of g")
    pts = set(f.xs)
    lo, hi = f.ys[0], f.ys[-1]
    for u in g.xs:
        if lo < u < hi:
            pts.add(f.preimage(u))
    xs = sorted(pts)
    return PLHomeo([(x, g.evaluate(f.evaluate(x))) for x in xs])


def invert(f):
    return PLHomeo(list(zip(f.ys, f.xs)))


class Flags(NamedTuple):
    in_F: bool
    in_H: bool
    in_Fprime: bool


def classify(f):
    if f.xs[0] != 0 or f.xs[-1] != 1 or f.ys[0] != 0 or f.ys[-1] != 1:
        raise PLError("classify expects a homeomorphism of [0, 1]")
    # dyadic breakpoints and power-of-2 slopes hold by construction
    in_H = f.logs[0] == f.logs[-1]
    in_Fprime = f.is_identity() or (len(f.logs) >= 3 and f.logs[0] == 0 and f.logs[-1] == 0)
    return Flags(True, in_H, in_Fprime)


def germ(f, x):
    """(log2 left slope, log2 right slope) at x; None for a missing side."""
    if not (f.xs[0] <= x <= f.xs[-1]):
        raise PLError(f"{x} outside domain")
    i = f.segment_at(x, "left")
    j = f.segment_at(x, "right")
    return (None if i is None else f.logs[i], None if j is None else f.logs[j])


def transport(f, J, orientation="preserve"):
    """Conjugate f (a map of I = f.domain) to J by an isometry J -> I."""
    I = f.domain
    if I.length != J.length:
        raise PLError(f"length mismatch: {I} vs {J}")
    if orientation == "preserve":
        d = J.lo - I.lo
        return PLHomeo([(x + d, y + d) for x, y in zip(f.xs, f.ys)])
    if orientation == "reverse":
        c = I.hi + J.lo  # T(x) = c - x is its own inverse shape
        nodes = [(c - x, c - y) for x, y in zip(f.xs, f.ys)]
        return PLHomeo(nodes[::-1])
    raise PLError(f"unknown orientation {orientation!r}")


def flip(f):
    """s -> 1 - f(1 - s) for a map of [0, 1] (values may leave [0, 1])."""
    nodes = [(1 - x, 1 - y) for x, y in zip(f.xs, f.ys)]
    return PLHomeo(nodes[::-1])


def _power_pieces(length):
    """Binary decomposition of a positive dyadic length, largest piece first."""
    out = []
    m, e = length.m, length.e
    bit = m.bit_length() - 1
    while m:
        if m >> bit & 1:
            out.append(Dyadic(1, 0).scale(bit - e))
            m ^= 1 << bit
        bit -= 1
    return out


def _split_to(pieces, n):
    pieces = list(pieces)
    while len(pieces) < n:
        i = max(range(len(pieces)), key=lambda t: (pieces[t], -t))
        p = pieces[i].half()
        pieces[i:i + 1] = [p, p]
    return pieces


def dyadic_interpolate(src, dst):
    """Increasing PL map src -> dst with dyadic breakpoints and power-of-2 slopes.

    Both lengths are cut into the same number of power-of-2 pieces (binary
    expansion, then halving the largest piece until the counts agree) and the
    pieces are matched in order.
    """
    a = _power_pieces(src.length)
    b = _power_pieces(dst.length)
    n = max(len(a), len(b))
    a, b = _split_to(a, n), _split_to(b, n)
    nodes = [(src.lo, dst.lo)]
    x, y = src.lo, dst.lo
    for pa, pb in zip(a, b):
        x, y = x + pa, y + pb
        nodes.append((x, y))
    return PLHomeo(nodes)


def extend_to_homeo(partial, frame):
    """Extend partial: [p, q] -> [p', q'] to a map of frame fixing its endpoints."""
    p, q = partial.xs[0], partial.xs[-1]
    p2, q2 = partial.ys[0], partial.ys[-1]
    lo, hi = frame.lo, frame.hi
    if not (lo <= p and lo <= p2 and q <= hi and q2 <= hi):
        raise PLError(f"frame {frame} does not contain {partial.domain} and {partial.range}")
    if (p == lo) != (p2 == lo) or (q == hi) != (q2 == hi):
        raise PLError("partial map touches the frame boundary on one side only")
    nodes = []
    if lo < p:
        nodes += dyadic_interpolate(Interval(lo, p), Interval(lo, p2)).nodes[:-1]
    nodes += partial.nodes
    if q < hi:
        nodes += dyadic_interpolate(Interval(q, hi), Interval(q2, hi)).nodes[1:]
    return PLHomeo(nodes)


def thompson_x(n):
    """Standard generator x_n of F: identity on [0, 1 - 2^-n], a copy of x_0 after."""
    x0 = PLHomeo([(0, 0), (Dyadic(1, 1), Dyadic(1, 2)), (Dyadic(3, 2), Dyadic(1, 1)), (1, 1)])
    if n == 0:
        return x0
    c = 1 - Dyadic(1, n)
    nodes = [(0, 0)] + [(c + x.scale(-n), c + y.scale(-n)) for x, y in zip(x0.xs, x0.ys)]
    return PLHomeo(nodes)


@lru_cache(maxsize=None)
def default_nus():
    """nu_1 = x0 x1^-2, nu_2 = x1 x2^-1, nu_3 = x2 x3^-1 (right-action products)."""
    x = [thompson_x(i) for i in range(4)]
    nu1 = then_compose(x[0], invert(x[1]), invert(x[1]))
    nu2 = then_compose(x[1], invert(x[2]))
    nu3 = then_compose(x[2], invert(x[3]))
    return (nu1, nu2, nu3)
