"""Bar-resolution cochains over small groups, normalized cocycles and central
extensions, and the replayer for sigma-token rewriting certificates.

Scalars are exact Fractions.  Groups are given by a GroupOracle over a finite
universe of hashable element ids; a partial oracle (e.g. a window of Z) raises
ClosureError when a product leaves the universe.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction

__all__ = [
    "ClosureError",
    "GroupOracle",
    "cyclic",
    "dihedral",
    "quaternion",
    "direct_product",
    "integer_window",
    "small_groups",
    "Cochain",
    "delta",
    "CocycleFlags",
    "classify",
    "ExtensionElement",
    "extension_product",
    "extension_inverse",
    "canonical_section",
    "section_to_cocycle",
    "random_normalized_cocycle",
    "ConjugationReport",
    "check_conjugation_invariance",
    "Fact",
    "Token",
    "Step",
    "Certificate",
    "ReplayError",
    "ReplayResult",
    "ElementEvidence",
    "replay",
    "evidence_hash",
]


# -- groups ------------------------------------------------------------------------------


class ClosureError(ArithmeticError):
    pass


@dataclass
class GroupOracle:
    name: str
    universe: list
    _mul: object = field(repr=False)
    _inv: object = field(repr=False)
    identity: object = None
    closed: bool = True

    def __post_init__(self):
        self._members = set(self.universe)

    def mul(self, x, y):
        z = self._mul(x, y)
        if z not in self._members:
            raise ClosureError(f"{x} * {y} = {z} leaves the universe of {self.name}")
        return z

    def inv(self, x):
        z = self._inv(x)
        if z not in self._members:
            raise ClosureError(f"{x}^-1 leaves the universe of {self.name}")
        return z

    def conj(self, x, h):
        """x^h = h^-1 x h."""
        return self.mul(self.mul(self.inv(h), x), h)

    def check_laws(self, samples=None, seed=0):
        """Spot-check associativity and inverses on the closed part."""
        rng = random.Random(seed)
        U = self.universe
        triples = itertools.product(U, repeat=3) if samples is None else (
            tuple(rng.choice(U) for _ in range(3)) for _ in range(samples))
        for x, y, z in triples:
            try:
                if self.mul(self.mul(x, y), z) != self.mul(x, self.mul(y, z)):
                    return False
            except ClosureError:
                if self.closed:
                    raise
        for x in U:
            try:
                if self.mul(x, self.inv(x)) != self.identity or self.mul(self.identity, x) != x:
                    return False
            except ClosureError:
                if self.closed:
                    raise
        return True

    def __len__(self):
        return len(self.universe)


def cyclic(n):
    return GroupOracle(f"Z/{n}", list(range(n)), lambda x, y: (x + y) % n, lambda x: (-x) % n, 0)


def dihedral(n):
    """Symmetries of the n-gon, elements (r, s) meaning rotation^r reflection^s, order 2n."""
    def mul(x, y):
        r1, s1 = x
        r2, s2 = y
        return ((r1 + (-r2 if s1 else r2)) % n, s1 ^ s2)

    def inv(x):
        r, s = x
        return (r, 1) if s else ((-r) % n, 0)

    U = [(r, s) for s in (0, 1) for r in range(n)]
    return GroupOracle(f"D{n}", U, mul, inv, (0, 0))


def quaternion():
    """Q8 as unit quaternions +-1, +-i, +-j, +-k encoded (sign, axis)."""
    table = {  # axis products: (a, b) -> (sign, axis), axis 0 = 1
        (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
        (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
        (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
        (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
    }

    def mul(x, y):
        s, a = table[(x[1], y[1])]
        return (x[0] * y[0] * s, a)

    def inv(x):
        return x if x[1] == 0 else (-x[0], x[1])

    U = [(s, a) for a in range(4) for s in (1, -1)]
    return GroupOracle("Q8", U, mul, inv, (1, 0))


def direct_product(G, H):
    U = [(g, h) for g in G.universe for h in H.universe]
    return GroupOracle(
        f"{G.name}x{H.name}", U,
        lambda x, y: (G.mul(x[0], y[0]), H.mul(x[1], y[1])),
        lambda x: (G.inv(x[0]), H.inv(x[1])),
        (G.identity, H.identity),
    )


def integer_window(N):
    """{-N, ..., N} inside (Z, +); products leaving the window raise ClosureError."""
    return GroupOracle(f"Z[-{N},{N}]", list(range(-N, N + 1)), lambda x, y: x + y, lambda x: -x, 0, closed=False)


def small_groups():
    """All the finite test groups of order at most 8."""
    out = [cyclic(n) for n in range(1, 9)]
    out += [dihedral(3), dihedral(4), quaternion(), direct_product(cyclic(2), cyclic(2)),
            direct_product(cyclic(2), cyclic(4)), direct_product(direct_product(cyclic(2), cyclic(2)), cyclic(2))]
    return out


# -- cochains --------------------------------------------------------------------------


@dataclass
class Cochain:
    oracle: GroupOracle
    degree: int
    values: dict  # n-tuples -> Fraction; degree 0 has the single key ()

    def __call__(self, *gs):
        return self.values[tuple(gs)]

    @classmethod
    def from_function(cls, oracle, degree, fn):
        vals = {}
        for t in itertools.product(oracle.universe, repeat=degree):
            vals[t] = Fraction(fn(*t))
        return cls(oracle, degree, vals)

    def is_zero(self):
        return all(v == 0 for v in self.values.values())

    def __add__(self, other):
        return Cochain(self.oracle, self.degree, {t: v + other.values[t] for t, v in self.values.items()})

    def __sub__(self, other):
        return Cochain(self.oracle, self.degree, {t: v - other.values[t] for t, v in self.values.items()})


def delta(c):
    """Coboundary with trivial coefficients; delta^0 = 0 on constants."""
    G, n = c.oracle, c.degree
    if n == 0:
        return Cochain.from_function(G, 1, lambda g: 0)
    vals = {}
    for t in itertools.product(G.universe, repeat=n + 1):
        try:
            s = c.values[t[1:]]
            for i in range(1, n + 1):
                merged = t[:i - 1] + (G.mul(t[i - 1], t[i]),) + t[i + 1:]
                s += (-1) ** i * c.values[merged]
            s += (-1) ** (n + 1) * c.values[t[:n]]
        except ClosureError:
            continue  # partial universes: delta is defined where the products are
        vals[t] = s
    return Cochain(G, n + 1, vals)


@dataclass
class CocycleFlags:
    cocycle: bool
    normalized: bool
    homogeneous: bool
    homogeneity_witness: tuple | None = None
    partial: list = field(default_factory=list)


def _cyclic_subgroup(G, g, limit=None):
    """Powers g^i (i >= 0 and i < 0) inside the universe; the flag says if closure failed."""
    pw = [G.identity]
    x = g
    truncated = False
    limit = limit or 4 * len(G.universe) + 4
    while x != G.identity and len(pw) < limit:
        pw.append(x)
        try:
            x = G.mul(x, g)
        except ClosureError:
            truncated = True
            break
    if truncated:
        x = G.identity
        try:
            gi = G.inv(g)
            while True:
                x = G.mul(x, gi)
                if x in pw:
                    break
                pw.append(x)
        except ClosureError:
            pass
    return pw, truncated


def classify(w):
    """Exhaustive flags for a 2-cochain.  Homogeneity is checked on every cyclic subgroup."""
    if w.degree != 2:
        raise ValueError("classify expects a 2-cochain")
    G = w.oracle
    cocycle = delta(w).is_zero()
    e = G.identity
    normalized = all(w(g, e) == 0 and w(e, g) == 0 for g in G.universe)
    homogeneous, witness, partial = True, None, []
    for g in G.universe:
        pw, trunc = _cyclic_subgroup(G, g)
        if trunc:
            partial.append(g)
        for x in pw:
            for y in pw:
                if w.values.get((x, y), 0) != 0:
                    homogeneous, witness = False, (g, x, y)
                    break
            if not homogeneous:
                break
        if not homogeneous:
            break
    return CocycleFlags(cocycle, normalized, homogeneous, witness, partial)


# -- central extensions ------------------------------------------------------------------


@dataclass(frozen=True)
class ExtensionElement:
    scalar: Fraction
    g: object


def _require_normalized_cocycle(w):
    f = classify(w)
    if not (f.cocycle and f.normalized):
        raise ValueError("extension needs a normalized 2-cocycle")


def extension_product(x, y, w, check=False):
    """(l, f)(m, g) = (l + m + w(f, g), fg)."""
    if check:
        _require_normalized_cocycle(w)
    G = w.oracle
    return ExtensionElement(x.scalar + y.scalar + w(x.g, y.g), G.mul(x.g, y.g))


def extension_inverse(x, w):
    G = w.oracle
    gi = G.inv(x.g)
    return ExtensionElement(-x.scalar - w(x.g, gi), gi)


def canonical_section(w):
    """The set-theoretic inclusion g -> (0, g) into the w-extension."""
    return {g: ExtensionElement(Fraction(0), g) for g in w.oracle.universe}


def section_to_cocycle(sigma, w_ext):
    """w(f, g) = sigma(f) sigma(g) sigma(fg)^-1, computed inside the w_ext-extension."""
    G = w_ext.oracle
    if sigma[G.identity] != ExtensionElement(Fraction(0), G.identity):
        raise ValueError("section is not normalized")
    vals = {}
    for f in G.universe:
        for g in G.universe:
            p = extension_product(sigma[f], sigma[g], w_ext)
            q = extension_product(p, extension_inverse(sigma[G.mul(f, g)], w_ext), w_ext)
            if q.g != G.identity:
                raise ValueError("sigma is not a section")
            vals[(f, g)] = q.scalar
    return Cochain(G, 2, vals)


def random_normalized_cocycle(G, rng, span=8):
    """delta of a random normalized potential (over finite groups every cocycle is one)."""
    phi = {g: Fraction(rng.randint(-span, span), rng.choice((1, 2, 4))) for g in G.universe}
    phi[G.identity] = Fraction(0)
    return delta(Cochain(G, 1, {(g,): v for g, v in phi.items()}))


@dataclass
class ConjugationReport:
    ok: bool
    homogeneous: bool
    checked: int
    witness: tuple | None = None

    def to_json(self):
        return {"ok": self.ok, "homogeneous": self.homogeneous, "checked": self.checked,
                "witness": None if self.witness is None else [repr(x) for x in self.witness]}


def check_conjugation_invariance(w, samples=None, seed=0):
    """w(f^h, g^h) = w(f, g) on sampled (f, g, h); homogeneity is checked first."""
    G = w.oracle
    flags = classify(w)
    if not flags.homogeneous:
        return ConjugationReport(False, False, 0, flags.homogeneity_witness)
    rng = random.Random(seed)
    U = G.universe
    triples = itertools.product(U, repeat=3) if samples is None else (
        tuple(rng.choice(U) for _ in range(3)) for _ in range(samples))
    n = 0
    for f, g, h in triples:
        try:
            lhs = w(G.conj(f, h), G.conj(g, h))
        except ClosureError:
            continue
        n += 1
        if lhs != w(f, g):
            return ConjugationReport(False, True, n, (f, g, h))
    return ConjugationReport(True, True, n)


# -- certificates ----------------------------------------------------------------------------
#
# A token stands for sigma(x) or sigma(x)^-1 where x is a product of named
# elements.  Rules act on the token list:
#   MERGE  sigma(x) sigma(y) -> sigma(xy)        licence: x, y in a 2-boundedly acyclic subgroup
#   SPLIT  sigma(xy) -> sigma(x) sigma(y)        same licence (the token is split after `cut` names)
#   SWAP   sigma(x) sigma(y) -> sigma(y) sigma(x)   licence: AbelianPair(x, y)
#   REWRITE sigma(x) -> sigma(y)                 licence: GroupIdentity(x, y) holding exactly in G
#   INVERT sigma(x)^-1 -> sigma(x^-1)            licence: CyclicPower(x)
#   CANCEL-AGAINST-TAIL sigma(x) sigma(x)^-1 -> (nothing)   no licence
# Acceptance requires every cited fact to re-verify and the list to end empty.

BAC_KINDS = ("FixpointSubgroup", "AbelianPair", "CyclicPower")
RULE_LICENCES = {
    "MERGE": BAC_KINDS,
    "SPLIT": BAC_KINDS,
    "SWAP": ("AbelianPair",),
    "REWRITE": ("GroupIdentity",),
    "INVERT": ("CyclicPower",),
    "CANCEL-AGAINST-TAIL": (None,),
}


@dataclass(frozen=True)
class Token:
    expr: tuple  # names, multiplied left to right (right actions: first name acts first)
    inv: bool = False

    def to_json(self):
        return {"expr": list(self.expr), "inv": self.inv}

    @classmethod
    def from_json(cls, obj):
        return cls(tuple(obj["expr"]), bool(obj.get("inv", False)))

    def __str__(self):
        s = "sigma(" + ".".join(self.expr) + ")"
        return s + "^-1" if self.inv else s


@dataclass
class Fact:
    id: str
    kind: str
    members: list = field(default_factory=list)  # list of exprs (tuples of names)
    point: object = None  # FixpointSubgroup
    lhs: tuple = ()  # GroupIdentity
    rhs: tuple = ()
    evidence: str = ""  # sha256 of the element dumps the fact talks about
    note: str = ""

    def names(self):
        out = set()
        for m in self.members:
            out.update(m)
        out.update(self.lhs)
        out.update(self.rhs)
        return sorted(out)

    def to_json(self):
        d = {"id": self.id, "kind": self.kind, "evidence": self.evidence}
        if self.members:
            d["members"] = [list(m) for m in self.members]
        if self.point is not None:
            d["point"] = str(self.point)
        if self.lhs or self.rhs:
            d["lhs"], d["rhs"] = list(self.lhs), list(self.rhs)
        if self.note:
            d["note"] = self.note
        return d

    @classmethod
    def from_json(cls, obj):
        from .dyadic import parse_number

        pt = obj.get("point")
        return cls(
            obj["id"], obj["kind"], [tuple(m) for m in obj.get("members", [])],
            None if pt is None else parse_number(pt),
            tuple(obj.get("lhs", ())), tuple(obj.get("rhs", ())),
            obj.get("evidence", ""), obj.get("note", ""),
        )


@dataclass
class Step:
    rule: str
    at: int
    fact: str | None = None
    cut: int | None = None  # SPLIT only

    def to_json(self):
        d = {"rule": self.rule, "at": self.at, "fact": self.fact}
        if self.cut is not None:
            d["cut"] = self.cut
        return d

    @classmethod
    def from_json(cls, obj):
        return cls(obj["rule"], int(obj["at"]), obj.get("fact"), obj.get("cut"))


@dataclass
class Certificate:
    tokens: list
    facts: list
    steps: list
    header: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "header": self.header,
            "tokens": [t.to_json() for t in self.tokens],
            "facts": [f.to_json() for f in self.facts],
            "steps": [s.to_json() for s in self.steps],
        }

    @classmethod
    def from_json(cls, obj):
        try:
            return cls(
                [Token.from_json(t) for t in obj["tokens"]],
                [Fact.from_json(f) for f in obj["facts"]],
                [Step.from_json(s) for s in obj["steps"]],
                obj.get("header", {}),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ReplayError(None, f"malformed certificate: {exc}") from exc


class ReplayError(Exception):
    def __init__(self, step, reason):
        self.step = step
        self.reason = reason
        where = "certificate" if step is None else f"step {step}"
        super().__init__(f"{where}: {reason}")


@dataclass
class ReplayResult:
    accepted: bool
    steps_replayed: int
    failed_step: int | None = None
    reason: str = ""
    trace: list = field(default_factory=list)

    def to_json(self):
        return {"accepted": self.accepted, "steps_replayed": self.steps_replayed,
                "failed_step": self.failed_step, "reason": self.reason, "trace": self.trace}


class ElementEvidence:
    """Checkers backed by exact element arithmetic.  ``elements`` maps names to GElements."""

    def __init__(self, elements):
        self.elements = dict(elements)
        self._products = {}

    def product(self, expr):
        from .element import identity_element, product

        expr = tuple(expr)
        got = self._products.get(expr)
        if got is None:
            if not expr:
                rho = next(iter(self.elements.values())).rho
                got = identity_element(rho)
            else:
                got = product([self._named(n) for n in expr])
            self._products[expr] = got
        return got

    def _named(self, n):
        from .element import invert

        if n in self.elements:
            return self.elements[n]
        if n.endswith("^-1") and n[:-3] in self.elements:
            self.elements[n] = invert(self.elements[n[:-3]])
            return self.elements[n]
        raise KeyError(f"unknown element {n!r}")

    def digest(self, names):
        return evidence_hash({n: self.elements[n].to_json() for n in names if n in self.elements})

    def check(self, fact):
        """None if the fact holds exactly, else a reason."""
        from .element import commutator, equals, evaluate

        try:
            if fact.evidence and fact.evidence != self.digest(fact.names()):
                return "evidence hash does not match the supplied elements"
            if fact.kind == "FixpointSubgroup":
                if fact.point is None or not fact.members:
                    return "fixpoint fact needs members and a point"
                for m in fact.members:
                    if evaluate(self.product(m), fact.point) != fact.point:
                        return f"{'.'.join(m)} moves {fact.point}"
                return None
            if fact.kind == "AbelianPair":
                if len(fact.members) != 2:
                    return "abelian pair needs two members"
                x, y = (self.product(m) for m in fact.members)
                if not commutator(x, y).is_identity():
                    return "members do not commute"
                return None
            if fact.kind == "CyclicPower":
                if len(fact.members) != 1:
                    return "cyclic fact needs one member"
                self.product(fact.members[0])
                return None
            if fact.kind == "GroupIdentity":
                if not equals(self.product(fact.lhs), self.product(fact.rhs)):
                    return "the two sides differ"
                return None
        except KeyError as exc:
            return str(exc)
        return f"unknown fact kind {fact.kind!r}"


def evidence_hash(obj):
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def _generated_by(expr, members):
    """expr is a concatenation of member exprs (syntactic membership in the subgroup)."""
    expr = tuple(expr)
    if not expr:
        return True
    for m in members:
        m = tuple(m)
        if m and expr[:len(m)] == m and _generated_by(expr[len(m):], members):
            return True
    return False


def replay(cert, checker):
    """Re-execute the rewriting chain; every cited fact is re-verified first."""
    facts = {f.id: f for f in cert.facts}
    verdicts = {}
    tokens = list(cert.tokens)
    trace = [" ".join(map(str, tokens))]

    def fail(i, reason):
        return ReplayResult(False, i, i, reason, trace)

    for i, st in enumerate(cert.steps):
        allowed = RULE_LICENCES.get(st.rule)
        if allowed is None:
            return fail(i, f"unknown rule {st.rule!r}")
        fact = None
        if allowed == (None,):
            if st.fact is not None:
                return fail(i, f"{st.rule} takes no licence")
        else:
            fact = facts.get(st.fact)
            if fact is None:
                return fail(i, f"cites unknown fact {st.fact!r}")
            if fact.kind not in allowed:
                return fail(i, f"{st.rule} cannot be licensed by {fact.kind}")
            if fact.id not in verdicts:
                verdicts[fact.id] = checker.check(fact)
            if verdicts[fact.id] is not None:
                return fail(i, f"fact {fact.id} does not verify: {verdicts[fact.id]}")
        j = st.at
        need = 1 if st.rule in ("REWRITE", "INVERT", "SPLIT") else 2
        if not (0 <= j and j + need <= len(tokens)):
            return fail(i, f"position {j} out of range for {len(tokens)} tokens")
        x = tokens[j]
        y = tokens[j + 1] if need == 2 else None

        if st.rule == "CANCEL-AGAINST-TAIL":
            if not (x.expr == y.expr and x.inv != y.inv):
                return fail(i, f"{x} and {y} do not cancel")
            new = []
        elif st.rule in ("MERGE", "SWAP"):
            if x.inv or y.inv:
                return fail(i, f"{st.rule} needs uninverted tokens")
            members = fact.members
            if fact.kind == "AbelianPair":
                ok = {tuple(x.expr), tuple(y.expr)} == {tuple(m) for m in members}
            else:
                ok = _generated_by(x.expr, members) and _generated_by(y.expr, members)
            if not ok:
                return fail(i, f"{x}, {y} are not covered by fact {fact.id}")
            new = [Token(x.expr + y.expr)] if st.rule == "MERGE" else [y, x]
        elif st.rule == "SPLIT":
            c = st.cut
            if x.inv or c is None or not 0 < c < len(x.expr):
                return fail(i, "bad split")
            left, right = x.expr[:c], x.expr[c:]
            if not (_generated_by(left, fact.members) and _generated_by(right, fact.members)):
                return fail(i, f"{x} is not covered by fact {fact.id}")
            new = [Token(left), Token(right)]
        elif st.rule == "REWRITE":
            if x.inv or tuple(x.expr) != tuple(fact.lhs):
                return fail(i, f"{x} does not match the left side of fact {fact.id}")
            new = [Token(tuple(fact.rhs))]
        else:  # INVERT
            if not x.inv or tuple(x.expr) != tuple(fact.members[0]):
                return fail(i, f"{x} is not the inverse of the cyclic fact's member")
            # names ending in "^-1" denote inverses of the named elements
            new = [Token(tuple(_inv_name(n) for n in reversed(x.expr)))]
        tokens[j:j + need] = new
        trace.append(f"{st.rule}@{j}: " + " ".join(map(str, tokens)))
    if tokens:
        return ReplayResult(False, len(cert.steps), len(cert.steps),
                            "non-empty residue: " + " ".join(map(str, tokens)), trace)
    return ReplayResult(True, len(cert.steps), None, "", trace)


def _inv_name(n):
    return n[:-3] if n.endswith("^-1") else n + "^-1"
