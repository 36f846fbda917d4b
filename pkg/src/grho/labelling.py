"""The quasi-periodic labelling rho of the half-integers and its context words.

Letters are one-character strings: ``a``/``b`` and their inverses ``A``/``B``
(capitals denote inverses).  ``a``-type letters sit at integers, ``b``-type
letters at half-integers.  Positions are handled in doubled coordinates: the
half-integer p is stored as the integer 2p.

Level words obey W_{k+1} = W_k W_k X_k W_k W_k with X_k = a . inv(W_k) . b, so
W_k is both a prefix and a suffix of W_{k+1}.  The right-infinite prefix limit
labels p >= 0 and the left-infinite suffix limit labels p < 0.
"""

from __future__ import annotations

import math
import os
import threading
from dataclasses import dataclass, field
from fractions import Fraction

from .dyadic import Dyadic

__all__ = [
    "LWord",
    "Labelling",
    "PeriodicLabelling",
    "LabellingError",
    "QPReport",
    "formal_inverse",
    "letter_type",
    "iota",
    "verify_quasi_periodicity",
    "default_labelling",
]

_INV = str.maketrans("abAB", "ABab")


class LabellingError(ValueError):
    pass


def formal_inverse(word):
    """w_1 ... w_n  ->  w_n^-1 ... w_1^-1."""
    return word[::-1].translate(_INV)


def letter_type(c):
    return "a" if c in "aA" else "b"


@dataclass(frozen=True)
class LWord:
    """A word together with the parity of its first position (0 integer, 1 half)."""

    letters: str
    start_parity: int

    def __post_init__(self):
        for i, c in enumerate(self.letters):
            if c not in "abAB":
                raise LabellingError(f"bad letter {c!r}")
            want = "a" if (self.start_parity + i) % 2 == 0 else "b"
            if letter_type(c) != want:
                raise LabellingError(f"letter {c!r} at offset {i} breaks the a/b alternation")

    def inverse(self):
        if not self.letters:
            return self
        # the inverse starts with the inverse of the last letter
        return LWord(formal_inverse(self.letters), (self.start_parity + len(self.letters) - 1) % 2)

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return self.letters


def iota(x):
    """Unitwise reflection x -> 2 floor(x) + 1 - x."""
    n = math.floor(x)
    return 2 * n + 1 - x


def _doubled(p):
    """Half-integer position -> doubled integer coordinate."""
    if isinstance(p, int):
        return 2 * p
    q = 2 * Fraction(p) if not isinstance(p, Dyadic) else p.scale(1)
    if isinstance(q, Dyadic):
        if q.e:
            raise LabellingError(f"{p} is not in (1/2)Z")
        return q.m
    if q.denominator != 1:
        raise LabellingError(f"{p} is not in (1/2)Z")
    return q.numerator


class Labelling:
    """rho : (1/2)Z -> {a, A, b, B} built from a seed word by the level recursion.

    The level cache is append-only and guarded by a lock; values are never
    changed once computed.
    """

    def __init__(self, seed="ab", cache_dir=None):
        if len(seed) % 2 or seed[0] not in "aA":
            raise LabellingError("seed must have even length and start with an a-type letter")
        LWord(seed, 0)
        self.seed = seed
        self._levels = [seed]
        self._lock = threading.Lock()
        self._factor_cache = {}
        self.cache_dir = cache_dir if cache_dir is not None else os.environ.get("GRHO_CACHE_DIR")

    # -- levels -------------------------------------------------------------------

    def level(self, k):
        """Level word W_k (W_1 is the seed)."""
        if k < 1:
            raise LabellingError("levels start at 1")
        if k > len(self._levels):
            with self._lock:
                while len(self._levels) < k:
                    self._levels.append(self._next_level(len(self._levels) + 1))
        return self._levels[k - 1]

    def _next_level(self, k):
        path = None
        if self.cache_dir:
            path = os.path.join(self.cache_dir, f"level-{self.seed}-{k}.txt")
            if os.path.exists(path):
                with open(path) as fh:
                    return fh.read().strip()
        w = self._levels[-1]
        x = "a" + formal_inverse(w) + "b"
        nxt = w + w + x + w + w
        if path:
            os.makedirs(self.cache_dir, exist_ok=True)
            tmp = path + ".tmp"
            with open(tmp, "w") as fh:
                fh.write(nxt)
            os.replace(tmp, path)
        return nxt

    def _level_covering(self, d):
        """Smallest level whose word covers doubled position d from both sides."""
        k = 1
        while True:
            w = self.level(k)
            if (d >= 0 and d < len(w)) or (d < 0 and -d <= len(w)):
                return w
            k += 1

    def window(self, level):
        """rho on [-|W_L|/2, |W_L|/2) as a string; index i <-> doubled position i - |W_L|."""
        w = self.level(level)
        return w + w

    # -- letters and words ------------------------------------------------------------

    def letter_d(self, d):
        w = self._level_covering(d)
        return w[d] if d >= 0 else w[len(w) + d]

    def letter(self, p):
        return self.letter_d(_doubled(p))

    def word_d(self, start, stop):
        """Letters at doubled positions start..stop inclusive."""
        if stop < start:
            return ""
        span = max(abs(start), abs(stop)) + 1
        k = 1
        while len(self.level(k)) < span:
            k += 1
        w = self.level(k)
        n = len(w)
        window = w + w
        return window[start + n:stop + n + 1]

    def context_unit(self, n, k):
        """W([n, n+1], k): 2k+1 letters centred at n + 1/2."""
        c = 2 * n + 1
        return self.word_d(c - k, c + k)

    def context_point(self, x, k):
        """W(x, k): the context of the unit containing x."""
        return self.context_unit(math.floor(x), k)

    def context_interval(self, lo, hi, k):
        """W(J, k) for J = [lo, hi] with half-integer endpoints, |J| >= 1."""
        dlo, dhi = _doubled(lo), _doubled(hi)
        if dhi - dlo < 2:
            raise LabellingError("interval must have length at least 1")
        # y1 = lo + 1/2, y2 = hi - 1/2
        return self.word_d(dlo + 1 - k, dhi - 1 + k)

    def unit_class(self, n, word):
        if len(word) % 2 == 0:
            raise LabellingError("context words have odd length")
        l = len(word) // 2
        w = self.context_unit(n, l)
        if w == word:
            return "Pos"
        if w == formal_inverse(word):
            return "Neg"
        return "Neither"

    def find_unit_with_context(self, word, exclude=(), search_radius=10_000):
        """Smallest |m| (positive first on ties) with W([m, m+1], k) = word, m not excluded."""
        k = len(word) // 2
        exclude = set(exclude)
        for r in range(search_radius + 1):
            for m in ((r, -r) if r else (0,)):
                if m not in exclude and self.context_unit(m, k) == word:
                    return m
        raise LabellingError(f"no unit with context {word!r} within radius {search_radius}")

    # -- occurring factors ---------------------------------------------------------------

    def factors(self, length, start_parity):
        """All factors of the given length whose first letter sits at the given parity.

        Enumerated on the window two levels above the first level word longer
        than ``length`` and checked for saturation against the next level.
        """
        key = (length, start_parity)
        got = self._factor_cache.get(key)
        if got is not None:
            return got
        base = 1
        while len(self.level(base)) <= length:
            base += 1
        lev = base + 2
        cur = self._scan(lev, length, start_parity)
        while True:
            nxt = self._scan(lev + 1, length, start_parity)
            if nxt == cur:
                break
            cur, lev = nxt, lev + 1
        self._factor_cache[key] = cur
        return cur

    def _scan(self, level, length, start_parity):
        win = self.window(level)
        # window index parity equals doubled-position parity (|W_L| is even)
        return frozenset(win[i:i + length] for i in range(start_parity, len(win) - length + 1, 2))

    def contexts(self, k):
        """Occurring context words of radius k (length 2k+1, centre at a b-position)."""
        return self.factors(2 * k + 1, (k + 1) % 2)


class PeriodicLabelling(Labelling):
    """Test double: rho repeats a fixed even-length pattern starting at 0."""

    def __init__(self, pattern):
        LWord(pattern, 0)
        if len(pattern) % 2:
            raise LabellingError("pattern must have even length")
        self.pattern = pattern
        super().__init__(pattern)

    def _next_level(self, k):
        return self.pattern * (5 ** (k - 1))

    def letter_d(self, d):
        return self.pattern[d % len(self.pattern)]


_DEFAULT = {}


def default_labelling(seed="ab"):
    lab = _DEFAULT.get(seed)
    if lab is None:
        lab = _DEFAULT[seed] = Labelling(seed)
    return lab


@dataclass
class QPReport:
    recurrence_gaps: dict
    inverse_closure: bool
    min_nonperiod: int | None
    missing_inverses: list = field(default_factory=list)
    window_length: int = 0

    def to_json(self):
        return {
            "recurrence_gaps": {str(k): v for k, v in sorted(self.recurrence_gaps.items())},
            "inverse_closure": self.inverse_closure,
            "min_nonperiod": self.min_nonperiod,
            "missing_inverses": self.missing_inverses,
            "window_length": self.window_length,
        }


def recurrence_gap(win, length):
    """Smallest G such that every length-G subwindow contains every length-``length``
    factor of ``win``."""
    n = len(win)
    last, worst = {}, {}
    for i in range(n - length + 1):
        w = win[i:i + length]
        prev = last.get(w, -1)
        run = i - prev - 1
        if run > worst.get(w, -1):
            worst[w] = run
        last[w] = i
    gap = 0
    for w, i in last.items():
        run = max(worst[w], (n - length) - i)
        gap = max(gap, run + length)
    return gap


def verify_quasi_periodicity(rho, max_len, window_level, max_period=128):
    win = rho.window(window_level)
    gaps = {}
    missing = []
    for l in range(1, max_len + 1):
        gaps[l] = recurrence_gap(win, l)
        facs = {win[i:i + l] for i in range(len(win) - l + 1)}
        for w in sorted(facs):
            if formal_inverse(w) not in facs:
                missing.append(w)
    period = None
    for p in range(1, min(max_period, len(win) - 1) + 1):
        if win[p:] == win[:-p]:
            period = p
            break
    return QPReport(gaps, not missing, period, missing, len(win))
