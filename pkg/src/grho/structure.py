"""Atoms, decorated atoms and cellular decompositions for pairs of elements that
fix a neighbourhood of 0, and the embedding of a direct sum of copies of F'.

Anchors are the integers n around which the pair looks exactly as it does
around 0.  Consecutive anchors delimit atoms; atoms are grouped by their
decorated word W(I, l) up to formal inversion.  Equal words force equal
restrictions (conjugate atoms) and inverse words force flipped restrictions
(flip-conjugate atoms), because l exceeds the radius of both elements by more
than the atom length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .dyadic import Dyadic, as_exact
from .element import (
    UNIT_ID,
    GElement,
    conjugate,
    evaluate,
    identity_element,
    lift,
    reduce_radius,
)
from .labelling import formal_inverse
from .plmap import (
    Interval,
    PLHomeo,
    classify,
    dyadic_interpolate,
    then_compose as pl_then,
    invert as pl_invert,
    transport,
)

__all__ = [
    "DecoratedAtom",
    "AtomClass",
    "CellularDecomposition",
    "StructureError",
    "fixed_set",
    "common_fixed_interval",
    "fixes_neighbourhood",
    "anchor_set",
    "cellular_decompose",
    "decompose_conjugated",
    "project",
    "classes_disjoint",
    "phi_embed",
    "germ_pair",
]


class StructureError(ValueError):
    pass


@dataclass(frozen=True)
class DecoratedAtom:
    lo: int
    hi: int
    decoration: int
    word: str

    @property
    def length(self):
        return self.hi - self.lo


@dataclass
class AtomClass:
    word: str  # representative W_i; the class holds atoms decorated by W_i or W_i^-1
    length: int
    atoms: list = field(default_factory=list)
    rep: tuple = ()  # (context word of radius R, m1, m2, word == W_i) locating one atom

    def to_json(self):
        return {
            "word": self.word,
            "length": self.length,
            "representatives": [[a.lo, a.hi] for a in self.atoms[:3]],
            "atoms_in_window": len(self.atoms),
        }


@dataclass
class CellularDecomposition:
    K: int  # max radius of the pair
    l: int  # decoration
    max_atom: int
    radius: int  # radius of component tables
    anchor_word: str
    window: int
    anchors: list
    atoms: list
    classes: list

    def class_of(self, word):
        key = min(word, formal_inverse(word))
        for i, c in enumerate(self.classes):
            if c.word == key:
                return i
        raise StructureError(f"no class for decorated word {word!r}")

    def to_json(self):
        return {
            "K": self.K,
            "decoration": self.l,
            "max_atom_length": self.max_atom,
            "component_radius": self.radius,
            "window": self.window,
            "anchors_in_window": len(self.anchors),
            "classes": [c.to_json() for c in self.classes],
        }


# -- fixed sets ----------------------------------------------------------------------


def fixed_set(e, lo_unit, hi_unit):
    """Positive-length closed intervals fixed pointwise by e inside [lo_unit, hi_unit]."""
    out = []
    for n in range(lo_unit, hi_unit):
        g = e.table[e.rho.context_unit(n, e.k)]
        for a, b in g.fixed_pieces():
            if a < b:
                a, b = a + n, b + n
                if out and out[-1][1] >= a:
                    out[-1] = (out[-1][0], max(out[-1][1], b))
                else:
                    out.append((a, b))
    return out


def _intersect(A, B):
    out, i, j = [], 0, 0
    while i < len(A) and j < len(B):
        lo = max(A[i][0], B[j][0])
        hi = min(A[i][1], B[j][1])
        if lo < hi:
            out.append((lo, hi))
        if A[i][1] < B[j][1]:
            i += 1
        else:
            j += 1
    return out


def common_fixed_interval(f, g, window=64):
    """Maximal interval fixed by both (closest to 0 within [-window, window]); None if none."""
    both = _intersect(fixed_set(f, -window, window), fixed_set(g, -window, window))
    if not both:
        return None

    def dist(p):
        lo, hi = p
        d = 0 if lo <= 0 <= hi else min(abs(lo), abs(hi))
        return (d, -(hi - lo))

    lo, hi = min(both, key=dist)
    return Interval(lo, hi)


def fixes_neighbourhood(e, n):
    """True iff e is the identity on a two-sided neighbourhood of the integer n."""
    left = e.table[e.rho.context_unit(n - 1, e.k)]
    right = e.table[e.rho.context_unit(n, e.k)]
    return (left.logs[-1] == 0 and left.ys[-1] == 1) and (right.logs[0] == 0 and right.ys[0] == 0)


# -- anchors and atoms ------------------------------------------------------------------


def _anchor_word(rho, K):
    return rho.context_interval(-1, 1, K)


def anchor_set(f, g, window=64):
    """Integers n in [-window, window] whose surroundings match those of 0.

    n is an anchor iff W([n-1, n+1], K) is W([-1, 1], K) or its formal
    inverse, K the larger radius; then both elements act on units n-1 and n
    as on -1 and 0, possibly flipped, so they fix a neighbourhood of n.
    """
    for e in (f, g):
        if not fixes_neighbourhood(e, 0):
            raise StructureError("precondition: both elements must fix a neighbourhood of 0")
    rho = f.rho
    K = max(f.k, g.k)
    A = _anchor_word(rho, K)
    both = (A, formal_inverse(A))
    out = [n for n in range(-window, window + 1) if rho.context_interval(n - 1, n + 1, K) in both]
    for n in out:
        if not (fixes_neighbourhood(f, n) and fixes_neighbourhood(g, n)):
            raise StructureError(f"anchor {n} is not fixed; radius bookkeeping is wrong")
    return out


def _anchor_gap(rho, A):
    """Largest distance between consecutive anchors, saturated over windows."""
    prev = None
    level = 3
    while True:
        win = rho.window(level)
        n = len(win) // 2
        # A is centred on an integer position; its first letter sits at doubled 2c - (len-1)/2
        half = (len(A) - 1) // 2
        pos = []
        for B in {A, formal_inverse(A)}:
            i = win.find(B)
            while i >= 0:
                centre = i + half - n  # doubled position of the centre
                if centre % 2 == 0:
                    pos.append(centre // 2)
                i = win.find(B, i + 1)
        pos.sort()
        gap = max((b - a for a, b in zip(pos, pos[1:])), default=None)
        if gap is not None and gap == prev:
            return gap
        prev = gap
        level += 1
        if level > 12:
            raise StructureError("anchor gaps did not stabilise")


def _locate(w, R, K, A, max_atom):
    """Atom [m1, m2] around unit 0 for a radius-R context word (relative coordinates)."""
    def is_anchor(n):
        c = R - 1 + 2 * n  # index of doubled position 2n
        return w[c - 1 - K:c + 2 + K] in both

    both = (A, formal_inverse(A))
    m1 = next((n for n in range(0, -max_atom, -1) if is_anchor(n)), None)
    m2 = next((n for n in range(1, max_atom + 1) if is_anchor(n)), None)
    if m1 is None or m2 is None:
        raise StructureError("atom around unit 0 not determined by the context")
    return m1, m2


def _decorated(w, R, m1, m2, l):
    # doubled positions [2 m1 + 1 - l, 2 m2 - 1 + l]; index = position - 1 + R
    return w[2 * m1 - l + R:2 * m2 - 2 + l + R + 1]


def _atom_map(e, lo, hi):
    """Restriction of e to [lo, hi], translated to [0, hi - lo]."""
    return _glue([e.table[e.rho.context_unit(n, e.k)] for n in range(lo, hi)])


def _atom_map_from_word(e, w, R, m1, m2):
    """Same as _atom_map, read off a radius-R context word of unit 0 (relative coordinates)."""
    k = e.k
    return _glue([e.table[w[R + 2 * n - k:R + 2 * n + k + 1]] for n in range(m1, m2)])


def _glue(units):
    nodes = []
    for j, g in enumerate(units):
        pn = [(x + j, y + j) for x, y in zip(g.xs, g.ys)]
        nodes.extend(pn[1:] if nodes else pn)
    return PLHomeo(nodes)


def cellular_decompose(f, g, window=64):
    """Cellular decomposition of R suitable for f and g.

    Returns (decomposition, f_components, g_components); components are
    GElements listed in class order.
    """
    rho = f.rho
    anchors = anchor_set(f, g, window)
    K = max(f.k, g.k)
    A = _anchor_word(rho, K)
    Lmax = _anchor_gap(rho, A)
    l = K + 1 + Lmax
    R = l + 2 * Lmax

    # locating the atom of unit 0 in every occurring radius-R context enumerates
    # all decorated words of the line, not only those met in the window
    info = {}
    reps = {}
    for w in sorted(rho.contexts(R)):
        m1, m2 = _locate(w, R, K, A, Lmax)
        dw = _decorated(w, R, m1, m2, l)
        key = min(dw, formal_inverse(dw))
        info[w] = (m1, m2, dw, key)
        reps.setdefault(key, (w, m1, m2, dw == key))
    classes = [AtomClass(key, reps[key][2] - reps[key][1], rep=reps[key]) for key in sorted(reps)]
    index = {c.word: i for i, c in enumerate(classes)}

    atoms = []
    for a, b in zip(anchors, anchors[1:]):
        dw = rho.context_interval(a, b, l)
        atom = DecoratedAtom(a, b, l, dw)
        atoms.append(atom)
        classes[index[min(dw, formal_inverse(dw))]].atoms.append(atom)

    decomp = CellularDecomposition(K, l, Lmax, R, A, window, anchors, atoms, classes)
    for e in (f, g):
        _check_class_soundness(decomp, info, e)

    comps = []
    for e in (f, g):
        tables = [dict() for _ in classes]
        for w, (m1, m2, dw, key) in info.items():
            ci = index[key]
            gw = e.table[w[R - e.k:R + e.k + 1]]
            for i, t in enumerate(tables):
                t[w] = gw if i == ci else UNIT_ID
        comps.append([
            identity_element(rho) if all(u is UNIT_ID for u in t.values()) else reduce_radius(GElement(rho, R, t))
            for t in tables
        ])
    return decomp, comps[0], comps[1]


def decompose_conjugated(f, g, h, window=64):
    """Decompose f^h and g^h.  h is supplied by the caller and should move a
    common fixed interval of f and g onto a neighbourhood of 0."""
    return cellular_decompose(conjugate(f, h), conjugate(g, h), window)


def _oriented(v, direct):
    return v if direct else transport(v, v.domain, "reverse")


def _class_map(decomp, c, e):
    w, m1, m2, direct = c.rep
    return _oriented(_atom_map_from_word(e, w, decomp.radius, m1, m2), direct)


def _check_class_soundness(decomp, info, e):
    """Equal decorated words force equal restrictions, inverse words flipped ones."""
    R = decomp.radius
    refs = {c.word: _class_map(decomp, c, e) for c in decomp.classes}
    seen = set()
    for w, (m1, m2, dw, key) in info.items():
        # every unit of an atom sees the same decorated word; one look per word suffices
        if dw in seen:
            continue
        seen.add(dw)
        v = _oriented(_atom_map_from_word(e, w, R, m1, m2), dw == key)
        if v != refs[key]:
            raise StructureError(f"class {key!r} is not sound (context {w!r})")


def classes_disjoint(decomp, *component_lists):
    """Table-level check that components of distinct classes act on disjoint sets of units.

    Components fix every integer, so disjoint unit supports imply that they commute.
    """
    R = decomp.radius
    lifted = [[lift(c, R).table for c in comps] for comps in component_lists]
    for w in next(iter(lifted))[0]:
        active = {i for comps in lifted for i, t in enumerate(comps) if t[w] != UNIT_ID}
        if len(active) > 1:
            return False
    for comps in component_lists:
        for c in comps:
            if any(u.ys[0] != 0 or u.ys[-1] != 1 for u in c.table.values()):
                return False
    return True


# -- the embedding of a direct sum of copies of F' ---------------------------------------


def _psi(L):
    return dyadic_interpolate(Interval(0, 1), Interval(0, L))


def _phi_i(u, L):
    """Canonical copy of u in F'_{[0, L]}: conjugation by a dyadic PL map [0,1] -> [0,L]."""
    psi = _psi(L)
    return pl_then(pl_invert(psi), u, psi)


def project(decomp, e):
    """The F' coordinates of an element supported on atoms (inverse of phi_embed)."""
    out = []
    for c in decomp.classes:
        v = _class_map(decomp, c, e)
        psi = _psi(c.length)
        u = pl_then(psi, v, pl_invert(psi))
        if not classify(u).in_Fprime:
            raise StructureError("restriction to an atom is not compactly supported")
        out.append(u)
    return out


def phi_embed(decomp, f_tuple, rho):
    """phi(f_1, ..., f_m): on atoms of class i a copy of phi_i(f_i), flipped on W_i^-1 atoms."""
    if len(f_tuple) != len(decomp.classes):
        raise StructureError(f"expected {len(decomp.classes)} coordinates, got {len(f_tuple)}")
    copies = []
    for c, u in zip(decomp.classes, f_tuple):
        if not classify(u).in_Fprime:
            raise StructureError("coordinates must lie in F'")
        v = _phi_i(u, c.length)
        copies.append((v, transport(v, v.domain, "reverse")))
    R, K, l, Lmax = decomp.radius, decomp.K, decomp.l, decomp.max_atom
    A = decomp.anchor_word
    index = {c.word: i for i, c in enumerate(decomp.classes)}
    table, cache = {}, {}
    for w in rho.contexts(R):
        m1, m2 = _locate(w, R, K, A, Lmax)
        dw = _decorated(w, R, m1, m2, l)
        key = min(dw, formal_inverse(dw))
        i = index[key]
        direct, flipped = copies[i]
        v = direct if dw == key else flipped
        j = -m1
        ck = (i, dw == key, j)
        unit = cache.get(ck)
        if unit is None:
            unit = cache[ck] = v.restrict(j, j + 1).shifted(-j, -j)
        table[w] = unit
    return reduce_radius(GElement(rho, R, table))


def germ_pair(e, x):
    """(log2 left slope, log2 right slope) of e at a fixed point x."""
    if evaluate(e, x) != x:
        raise StructureError(f"{x} is not fixed")
    n = math.floor(x)
    t = as_exact(x - n)
    right = e.table[e.rho.context_unit(n, e.k)]
    if t == 0:
        left = e.table[e.rho.context_unit(n - 1, e.k)]
        return left.logs[-1], right.logs[right.segment_at(Dyadic(0), "right")]
    return right.logs[right.segment_at(t, "left")], right.logs[right.segment_at(t, "right")]
