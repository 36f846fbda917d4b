"""Elements of G_rho as finite context tables.

An element with radius k is a map from every occurring context word w of
length 2k+1 to a unit map g_w: [0, 1] -> R, and acts by

    x . e = n + g_w(x - n),   n = floor(x),  w = W([n, n+1], k).

Exactness makes equality decidable: two tables describe the same
homeomorphism of the line iff they agree after lifting to a common radius.
"""

from __future__ import annotations

import heapq
import math
import random
import re
from functools import lru_cache
from dataclasses import dataclass, field
from fractions import Fraction

from .dyadic import Dyadic, as_exact, to_fraction
from .labelling import formal_inverse
from .plmap import (
    Interval,
    PLHomeo,
    classify,
    default_nus,
    flip,
    identity,
    invert as pl_invert,
    transport,
)

__all__ = [
    "GElement",
    "ElementError",
    "SearchInconclusive",
    "MembershipReport",
    "GENERATOR_NAMES",
    "generator",
    "generator_step",
    "lambda_hom",
    "special",
    "identity_element",
    "evaluate",
    "then_compose",
    "product",
    "invert",
    "conjugate",
    "commutator",
    "reduce_radius",
    "equals",
    "parse_word",
    "word_to_element",
    "evaluate_word",
    "membership_check",
    "support_spec",
    "find_fixed_point",
    "fixed_point_nearest",
    "proximal_search",
]

HALF = Dyadic(1, 1)
UNIT_ID = identity(0, 1)
GENERATOR_NAMES = ("zeta1", "zeta2", "zeta3", "chi1", "chi2", "chi3")
_TOKEN = re.compile(r"^(zeta|chi)([123])(\^-1)?$")


class ElementError(ValueError):
    pass


class SearchInconclusive(RuntimeError):
    """A bounded search ran out of budget; the theory guarantees a solution exists."""


class GElement:
    """Context-table element.  Immutable once built."""

    __slots__ = ("rho", "k", "table", "shift_bound")

    def __init__(self, rho, k, table):
        self.rho = rho
        self.k = k
        self.table = dict(table)
        sb = 0
        for g in self.table.values():
            lo, hi = g.ys[0], g.ys[-1]
            sb = max(sb, math.ceil(-lo), math.ceil(hi - 1))
        self.shift_bound = sb

    def __call__(self, x):
        return evaluate(self, x)

    def entry(self, word):
        return self.table[word]

    def is_identity(self):
        return all(g == UNIT_ID for g in self.table.values())

    def __repr__(self):
        nontriv = sum(g != UNIT_ID for g in self.table.values())
        return f"GElement(k={self.k}, entries={len(self.table)}, non_identity={nontriv})"

    def to_json(self):
        return {
            "k": self.k,
            "entries": [{"word": w, "map": self.table[w].to_json()} for w in sorted(self.table)],
            "shift_bound": self.shift_bound,
        }

    @classmethod
    def from_json(cls, rho, obj):
        try:
            table = {e["word"]: PLHomeo.from_json(e["map"]) for e in obj["entries"]}
            el = cls(rho, int(obj["k"]), table)
        except (KeyError, TypeError) as exc:
            raise ElementError(f"malformed element JSON: {exc}") from exc
        for w in table:
            if len(w) != 2 * el.k + 1:
                raise ElementError(f"word {w!r} does not have length 2k+1")
        return el


# -- construction -------------------------------------------------------------------


def _table_for(rho, k, fn):
    return {w: fn(w) for w in rho.contexts(k)}


def identity_element(rho):
    return GElement(rho, 0, _table_for(rho, 0, lambda w: UNIT_ID))


def _copy_on(nu, lo, positive):
    return transport(nu, Interval(lo, lo + 1), "preserve" if positive else "reverse")


def _glue(pieces):
    nodes = []
    for p in pieces:
        pn = p.nodes
        if nodes:
            if nodes[-1] != pn[0]:
                raise ElementError("pieces do not glue continuously")
            pn = pn[1:]
        nodes.extend(pn)
    return PLHomeo(nodes)


def _chi_unit(nu, left_letter, right_letter):
    left = _copy_on(nu, -HALF, left_letter == "a").restrict(0, HALF)
    right = _copy_on(nu, HALF, right_letter == "a").restrict(HALF, 1)
    return _glue([left, right])


_GEN_CACHE = {}


def generator(rho, name, nus=None):
    """zeta_i / chi_i (append '^-1' for the inverse) as a table element."""
    nus = tuple(nus) if nus is not None else default_nus()
    key = (id(rho), name, nus)
    got = _GEN_CACHE.get(key)
    if got is not None and got.rho is rho:
        return got
    m = _TOKEN.match(name)
    if not m:
        raise ElementError(f"bad generator token {name!r}")
    kind, inverse = m.group(1), bool(m.group(3))
    nu = nus[int(m.group(2)) - 1]
    if inverse:
        nu = pl_invert(nu)
    if kind == "zeta":
        el = GElement(rho, 0, {w: (nu if w == "b" else flip(nu)) for w in rho.contexts(0)})
    else:
        el = GElement(rho, 1, _table_for(rho, 1, lambda w: _chi_unit(nu, w[0], w[2])))
    _GEN_CACHE[key] = el
    return el


@lru_cache(maxsize=256)
def _step_map(nus, i, inverse):
    return pl_invert(nus[i]) if inverse else nus[i]


def generator_step(rho, name, x, nus=None):
    """Evaluate one generator straight from its definition (no tables)."""
    nus = tuple(nus) if nus is not None else default_nus()
    m = _TOKEN.match(name)
    if not m:
        raise ElementError(f"bad generator token {name!r}")
    nu = _step_map(nus, int(m.group(2)) - 1, bool(m.group(3)))
    if m.group(1) == "zeta":
        n = math.floor(x)
        t = x - n
        if rho.letter_d(2 * n + 1) == "b":
            return as_exact(n + nu.evaluate(t))
        return as_exact(n + 1 - nu.evaluate(1 - t))
    n = math.floor(x + HALF)
    u = x - n + HALF
    if rho.letter_d(2 * n) == "a":
        return as_exact(n - HALF + nu.evaluate(u))
    return as_exact(n + HALF - nu.evaluate(1 - u))


def lambda_hom(rho, f):
    """lambda: H -> G_rho, the radius-0 element acting as f on b-units and flip(f) on B-units."""
    if not classify(f).in_H:
        raise ElementError("lambda_hom is defined on H only (equal boundary slopes)")
    return GElement(rho, 0, {w: (f if w == "b" else flip(f)) for w in rho.contexts(0)})


def special(rho, W, l, f):
    """Acts as f on units with context W, as flip(f) on units with context W^-1."""
    if len(W) != 2 * l + 1:
        raise ElementError(f"|W| = {len(W)} but 2l+1 = {2 * l + 1}")
    if not classify(f).in_Fprime:
        raise ElementError("special elements need f in F'")
    Winv = formal_inverse(W)
    ff = flip(f)

    def pick(w):
        if w == W:
            return f
        if w == Winv:
            return ff
        return UNIT_ID

    return GElement(rho, l, _table_for(rho, l, pick))


# -- evaluation ------------------------------------------------------------------------


def evaluate(e, x):
    if isinstance(x, int):
        x = Dyadic(x)
    elif isinstance(x, Fraction):
        x = as_exact(x)
    n = math.floor(x)
    g = e.table[e.rho.context_unit(n, e.k)]
    return as_exact(g.evaluate(x - n) + n)


# -- group operations ---------------------------------------------------------------------


def _sub(w, K, j, k):
    c = K + 2 * j
    return w[c - k:c + k + 1]


def _compose_unit(g, hs, jlo):
    jhi = jlo + len(hs) - 1
    y0, y1 = g.ys[0], g.ys[-1]
    pts = set(g.xs)
    for idx, h in enumerate(hs):
        j = jlo + idx
        for u in h.xs:
            v = u + j
            if y0 < v < y1:
                pts.add(g.preimage(v))
    nodes = []
    for t in sorted(pts):
        y = g.evaluate(t)
        j = min(max(y.floor(), jlo), jhi)
        nodes.append((t, hs[j - jlo].evaluate(y - j) + j))
    return PLHomeo(nodes)


def then_compose(e1, e2):
    """x . then_compose(e1, e2) = (x . e1) . e2, canonicalized by reduce_radius."""
    rho = e1.rho
    k1, k2, d = e1.k, e2.k, e1.shift_bound
    K = max(k1, k2 + 2 * d)
    cache = {}
    table = {}
    for w in rho.contexts(K):
        g = e1.table[_sub(w, K, 0, k1)]
        jlo = g.ys[0].floor()
        jhi = math.ceil(g.ys[-1]) - 1
        hs = tuple(e2.table[_sub(w, K, j, k2)] for j in range(jlo, jhi + 1))
        key = (id(g), jlo, tuple(map(id, hs)))
        out = cache.get(key)
        if out is None:
            out = cache[key] = _compose_unit(g, hs, jlo)
        table[w] = out
    return reduce_radius(GElement(rho, K, table))


def product(elements, rho=None):
    elements = list(elements)
    if not elements:
        if rho is None:
            raise ElementError("empty product needs a labelling")
        return identity_element(rho)
    out = elements[0]
    for e in elements[1:]:
        out = then_compose(out, e)
    return out


def invert(e):
    rho, k, d = e.rho, e.k, e.shift_bound
    K = k + 2 * d
    cache = {}
    table = {}
    one = Dyadic(1)
    for w in rho.contexts(K):
        hs = tuple(e.table[_sub(w, K, j, k)] for j in range(-d, d + 1))
        key = tuple(map(id, hs))
        out = cache.get(key)
        if out is None:
            nodes = []
            for j, h in zip(range(-d, d + 1), hs):
                pn = [(x + j, y + j) for x, y in zip(h.xs, h.ys)]
                if nodes:
                    if nodes[-1] != pn[0]:
                        raise ElementError("adjacent unit maps do not glue; not a homeomorphism")
                    pn = pn[1:]
                nodes.extend(pn)
            F = PLHomeo(nodes)
            if not (F.ys[0] <= 0 and F.ys[-1] >= one):
                raise ElementError("inverse does not cover the unit; shift bound inconsistent")
            out = cache[key] = pl_invert(F).restrict(0, 1)
        table[w] = out
    return reduce_radius(GElement(rho, K, table))


def conjugate(e, h):
    """e^h = h^-1 e h."""
    return then_compose(then_compose(invert(h), e), h)


def commutator(x, y):
    """[x, y] = x^-1 y^-1 x y."""
    return product([invert(x), invert(y), x, y])


def _restricted(e, kk):
    """Table of e at radius kk, or None if e is not determined by radius-kk contexts."""
    k = e.k
    groups = {}
    for w, g in e.table.items():
        c = w[k - kk:k + kk + 1]
        prev = groups.setdefault(c, g)
        if prev is not g and prev != g:
            return None
    return groups


def reduce_radius(e):
    """Smallest radius at which e is still well defined (binary search; the property is monotone)."""
    lo, hi = 0, e.k  # answer lies in [lo, hi]
    best = None
    while lo < hi:
        mid = (lo + hi) // 2
        t = _restricted(e, mid)
        if t is None:
            lo = mid + 1
        else:
            hi, best = mid, t
    if hi == e.k:
        return e
    return GElement(e.rho, hi, best)


def lift(e, K):
    """The same element tabulated at radius K >= e.k."""
    if K < e.k:
        raise ElementError("can only lift to a larger radius")
    if K == e.k:
        return e
    d = K - e.k
    return GElement(e.rho, K, {w: e.table[w[d:len(w) - d]] for w in e.rho.contexts(K)})


def equals(e1, e2):
    K = max(e1.k, e2.k)
    for w in e1.rho.contexts(K):
        if e1.table[w[K - e1.k:K + e1.k + 1]] != e2.table[w[K - e2.k:K + e2.k + 1]]:
            return False
    return True


# -- words ------------------------------------------------------------------------------------


def parse_word(word):
    if isinstance(word, str):
        toks = word.replace(",", " ").split()
    else:
        toks = list(word)
    for t in toks:
        if not _TOKEN.match(t):
            raise ElementError(f"bad token {t!r}")
    return toks


def word_to_element(rho, word, nus=None):
    toks = parse_word(word)
    return product([generator(rho, t, nus) for t in toks], rho=rho)


def evaluate_word(rho, word, x, nus=None):
    """Step-by-step evaluation of a generator word (the table-free oracle)."""
    for t in parse_word(word):
        x = generator_step(rho, t, x, nus)
    return x


def inverse_word(word):
    out = []
    for t in reversed(parse_word(word)):
        out.append(t[:-3] if t.endswith("^-1") else t + "^-1")
    return out


# -- checks ------------------------------------------------------------------------------------


@dataclass
class MembershipReport:
    ok: bool
    k_f: int
    failures: list = field(default_factory=list)

    def to_json(self):
        return {"ok": self.ok, "k_f": self.k_f, "failures": self.failures}


def membership_check(e):
    rho, k = e.rho, e.k
    failures = []
    words = rho.contexts(k)
    for w in sorted(words - set(e.table)):
        failures.append(("missing-entry", w))
    for w in sorted(set(e.table) - words):
        failures.append(("non-occurring-word", w))
    for w, g in sorted(e.table.items()):
        if g.xs[0] != 0 or g.xs[-1] != 1:
            failures.append(("unit-domain", w))
    for w in sorted(words & set(e.table)):
        wi = formal_inverse(w)
        if wi in e.table and e.table[wi] != flip(e.table[w]):
            failures.append(("flip-rule", w, wi))
    for v in sorted(rho.factors(2 * k + 3, (k + 1) % 2)):
        w, wp = v[:2 * k + 1], v[2:]
        if w in e.table and wp in e.table:
            if e.table[w].ys[-1] - 1 != e.table[wp].ys[0]:
                failures.append(("adjacency", w, wp))
    ok = not failures
    k_f = reduce_radius(e).k if ok else k
    return MembershipReport(ok, k_f, failures)


def support_spec(e):
    """[(word, closure of the sub-support in [0, 1] as closed intervals)], identity entries omitted."""
    out = []
    for w in sorted(e.table):
        g = e.table[w]
        if g != UNIT_ID:
            out.append((w, g.support_closure()))
    return out


def _unit_order(radius, centre=0):
    yield centre
    for r in range(1, radius + 1):
        yield centre + r
        yield centre - r


def find_fixed_point(e, search_radius=1000):
    """First fixed point found scanning units 0, 1, -1, 2, ... (exact; may be non-dyadic)."""
    for n in _unit_order(search_radius):
        g = e.table[e.rho.context_unit(n, e.k)]
        pieces = g.fixed_pieces()
        if pieces:
            return as_exact(pieces[0][0] + n)
    raise SearchInconclusive(f"no fixed point within {search_radius} units")


def fixed_point_nearest(e, target, search_radius=1000):
    """A fixed point at minimal distance from ``target`` (ties: the smaller one)."""
    centre = math.floor(target)
    best = None
    for r in range(search_radius + 1):
        if best is not None and r - 1 > best[0]:
            break
        for n in ((centre + r, centre - r) if r else (centre,)):
            g = e.table[e.rho.context_unit(n, e.k)]
            for lo, hi in g.fixed_pieces():
                lo, hi = lo + n, hi + n
                x = lo if target <= lo else (hi if target >= hi else target)
                cand = (abs(x - target), x)
                if best is None or cand < best:
                    best = cand
    if best is None:
        raise SearchInconclusive(f"no fixed point within {search_radius} units")
    return as_exact(best[1])


def proximal_search(rho, I, J, budget=2000, seed=0, restarts=4, max_len=10, nus=None):
    """Word h with I . h inside the open interval J, by best-first search.

    Heuristic: scored by how far the image sticks out of J, then by its length.
    The returned word is re-verified exactly with the table arithmetic.
    """
    def inside(lo, hi):
        return J.lo < lo and hi < J.hi

    if inside(I.lo, I.hi):
        return []
    if budget <= 0:
        raise SearchInconclusive("budget exhausted")
    rng = random.Random(seed)
    tokens = [g + s for g in GENERATOR_NAMES for s in ("", "^-1")]

    def score(lo, hi, word):
        out = max(0, J.lo - lo) + max(0, hi - J.hi)
        return (to_fraction(out), to_fraction(hi - lo), len(word))

    spent = 0
    start = (I.lo, I.hi, ())
    per = max(1, budget // restarts)
    for attempt in range(restarts):
        heap = [(score(*start), 0, start)]
        seen = {start[:2]}
        counter = 1
        local = 0
        while heap and spent < budget and local < per:
            _, _, (lo, hi, word) = heapq.heappop(heap)
            spent += 1
            local += 1
            order = tokens[:]
            rng.shuffle(order)
            for t in order:
                lo2 = generator_step(rho, t, lo, nus)
                hi2 = generator_step(rho, t, hi, nus)
                w2 = word + (t,)
                if inside(lo2, hi2):
                    h = word_to_element(rho, list(w2), nus)
                    if inside(evaluate(h, I.lo), evaluate(h, I.hi)):
                        return list(w2)
                if len(w2) < max_len and (lo2, hi2) not in seen:
                    seen.add((lo2, hi2))
                    heapq.heappush(heap, (score(lo2, hi2, w2), counter, (lo2, hi2, w2)))
                    counter += 1
        # restart from a short random walk
        lo, hi, word = I.lo, I.hi, ()
        for _ in range(attempt + 1):
            t = rng.choice(tokens)
            lo, hi, word = generator_step(rho, t, lo, nus), generator_step(rho, t, hi, nus), word + (t,)
        start = (lo, hi, word)
        if spent >= budget:
            break
    raise SearchInconclusive(f"no word found within budget {budget}")
