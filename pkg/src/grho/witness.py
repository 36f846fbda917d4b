"""From a triple a1 a2 a3 = id to the full witness data: intervals J_i, the
conjugator h, f_i = a_i^h, the parameters (k, m, l, W), correctors g_i and the
interval system I_i, every claim checked exactly, and the rewriting
certificate for the sigma-token chain.

I_i is never materialised.  It is the union of the translates T_i + n over
units n whose radius-l context is W, and of the flipped copies over units
whose context is W^-1; claims about it are checked on context tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .cocycle import Certificate, ElementEvidence, Fact, Step, Token, replay
from .config import DEFAULT, Config, __version__
from .dyadic import Dyadic, as_exact
from .element import (
    ElementError,
    GElement,
    SearchInconclusive,
    commutator,
    conjugate,
    equals,
    evaluate,
    fixed_point_nearest,
    identity_element,
    invert,
    lambda_hom,
    lift,
    product,
    proximal_search,
    reduce_radius,
    special,
    then_compose,
    word_to_element,
)
from .labelling import formal_inverse
from .plmap import Interval, PLHomeo, classify, extend_to_homeo, invert as pl_invert

__all__ = [
    "Triple",
    "WitnessBundle",
    "ClaimFailure",
    "PipelineInconclusive",
    "initial_intervals",
    "find_h",
    "choose_parameters",
    "build_correctors",
    "verify_claims",
    "build_certificate",
    "run_pipeline",
    "element_from_spec",
    "triple_from_json",
]


class ClaimFailure(AssertionError):
    def __init__(self, failures):
        self.failures = failures  # [(claim, datum)]
        super().__init__("; ".join(f"claim {c}: {d}" for c, d in failures))

    @property
    def claims(self):
        return [c for c, _ in self.failures]


class PipelineInconclusive(RuntimeError):
    pass


# -- inputs -----------------------------------------------------------------------------


@dataclass
class Triple:
    a1: GElement
    a2: GElement
    a3: GElement
    specs: list = field(default_factory=list)  # JSON descriptions, kept for the report

    @property
    def elements(self):
        return (self.a1, self.a2, self.a3)

    def check(self):
        return product(list(self.elements)).is_identity()


def element_from_spec(rho, spec, previous=()):
    """Element from a JSON description.

    Accepted forms: a generator word string; {"word": ...}; {"lambda": nodes}
    (the radius-0 image of a map in H); {"special": {"W", "l", "map"}};
    {"element": dump}; {"close": true} for (a1 a2)^-1.
    """
    if isinstance(spec, str):
        return word_to_element(rho, spec)
    if not isinstance(spec, dict):
        raise ElementError(f"cannot read element from {spec!r}")
    if "word" in spec:
        return word_to_element(rho, spec["word"])
    if "lambda" in spec:
        return lambda_hom(rho, PLHomeo.from_json(spec["lambda"]))
    if "special" in spec:
        s = spec["special"]
        return special(rho, s["W"], int(s["l"]), PLHomeo.from_json(s["map"]))
    if "element" in spec:
        return GElement.from_json(rho, spec["element"])
    if spec.get("close"):
        if len(previous) != 2:
            raise ElementError("'close' is only valid for the third element")
        return invert(then_compose(previous[0], previous[1]))
    raise ElementError(f"unknown element description keys {sorted(spec)}")


def triple_from_json(rho, obj):
    specs = obj["triple"] if isinstance(obj, dict) else obj
    if len(specs) != 3:
        raise ElementError("a triple has three elements")
    els = []
    for s in specs:
        els.append(element_from_spec(rho, s, els))
    return Triple(*els, specs=list(specs))


# -- the bundle -----------------------------------------------------------------------------


@dataclass
class WitnessBundle:
    rho: object
    triple: Triple
    config: Config
    fixed_points: list = field(default_factory=list)  # y_i fixed by a_i, inside J_1
    J: list = field(default_factory=list)
    h: GElement | None = None
    h_word: list | None = None
    f: list = field(default_factory=list)
    T: list = field(default_factory=list)
    x: list = field(default_factory=list)  # x_i = y_i . h, fixed by f_i, inside T_1
    k: int | None = None
    m: int | None = None
    l: int | None = None
    W: str | None = None
    alpha: list = field(default_factory=list)
    g: list = field(default_factory=list)
    claims: dict = field(default_factory=dict)

    def elements(self):
        names = {}
        for i in range(3):
            names[f"f{i + 1}"] = self.f[i]
            names[f"g{i + 1}"] = self.g[i]
        return names

    def i_system(self):
        return {
            "description": "I_i = (T_i + N1) u (T_i.iota + N2), N1 = {n : W([n,n+1], l) = W}, N2 = {n : ... = W^-1}",
            "T": [t.to_json() for t in self.T],
            "W": self.W,
            "W_inverse": formal_inverse(self.W),
            "l": self.l,
        }

    def to_json(self):
        num = lambda v: str(as_exact(v))
        return {
            "tool_version": __version__,
            "config_hash": self.config.digest(),
            "triple": self.triple.specs,
            "fixed_points": [num(y) for y in self.fixed_points],
            "J": [j.to_json() for j in self.J],
            "h_word": self.h_word,
            "h": self.h.to_json() if self.h is not None else None,
            "T": [t.to_json() for t in self.T],
            "x": [num(v) for v in self.x],
            "k": self.k,
            "m": self.m,
            "l": self.l,
            "W": self.W,
            "alpha": [a.to_json() for a in self.alpha],
            "f": [e.to_json() for e in self.f],
            "g": [e.to_json() for e in self.g],
            "I_system": self.i_system() if self.W else None,
            "claims": self.claims,
        }


def elements_from_bundle_json(rho, obj):
    """Named elements (f1..g3) from a bundle dump, for certificate replay."""
    out = {}
    for i in range(3):
        out[f"f{i + 1}"] = GElement.from_json(rho, obj["f"][i])
        out[f"g{i + 1}"] = GElement.from_json(rho, obj["g"][i])
    return out


# -- steps ---------------------------------------------------------------------------------


def _outward(v, pad, down):
    """Round v outward to the grid pad * Z and move one more grid step."""
    q = as_exact(v) / pad  # pad is a power of two, so this is exact
    n = math.floor(q) - 1 if down else math.ceil(q) + 1
    return as_exact(n * pad)


def initial_intervals(rho, triple, cfg=DEFAULT):
    """J_1 around one fixed point of each a_i, then J_{i+1} ⊇ J_i ∪ J_i·a_i with margin."""
    ys = []
    for a in triple.elements:
        try:
            ys.append(fixed_point_nearest(a, cfg.fixed_point_target, cfg.fixed_point_radius))
        except SearchInconclusive as exc:
            raise PipelineInconclusive(f"fixed point search: {exc}") from exc
    J = [Interval(_outward(min(ys), cfg.j1_pad, True), _outward(max(ys), cfg.j1_pad, False))]
    for a in triple.elements:
        lo, hi = J[-1].lo, J[-1].hi
        lo2, hi2 = evaluate(a, lo), evaluate(a, hi)
        J.append(Interval(_outward(min(lo, lo2), cfg.j_pad, True), _outward(max(hi, hi2), cfg.j_pad, False)))
    return ys, J


def find_h(rho, J4, cfg=DEFAULT, budget=None):
    """(h, word) with J4 . h inside (0, 1); identity when J4 already is."""
    if 0 < J4.lo and J4.hi < 1:
        return identity_element(rho), []
    budget = cfg.search_budget if budget is None else budget
    try:
        word = proximal_search(rho, J4, Interval(0, 1), budget=budget, seed=cfg.rng_seed,
                               restarts=cfg.search_restarts, max_len=cfg.search_max_len)
    except SearchInconclusive as exc:
        raise PipelineInconclusive(f"h search: {exc}") from exc
    return word_to_element(rho, word), word


def apply_h(rho, h, J4, word):
    """Verify a recorded h exactly."""
    lo, hi = evaluate(h, J4.lo), evaluate(h, J4.hi)
    if not (0 < lo and hi < 1):
        raise ClaimFailure([("J4.h", f"recorded word {word} maps J4 to [{lo}, {hi}]")])


def choose_parameters(rho, fs, cfg=DEFAULT):
    """(k, m, l, W): k = max radius + 1, m != 0 agreeing with unit 0 at radius k, l first disagreement."""
    k = max(reduce_radius(f).k for f in fs) + 1
    W0 = rho.context_unit(0, k)
    m = rho.find_unit_with_context(W0, exclude=(0,), search_radius=cfg.unit_search_radius)
    l = k + 1
    while rho.context_unit(0, l) == rho.context_unit(m, l):
        l += 1
    W = rho.context_unit(0, l)
    if W == formal_inverse(rho.context_unit(m, l)):
        raise ClaimFailure([("parameters", "W equals the inverse of the context of unit m")])
    return k, m, l, W


def _unit0_map(e):
    return e.table[e.rho.context_unit(0, e.k)]


def build_correctors(rho, fs, T, l, W):
    """alpha_i agrees with f_i^-1 on T_i.f_i, is supported in T_{i+1}; g_i = special(W, l, alpha_i)."""
    alphas, gs = [], []
    for i, f in enumerate(fs):
        Ti, frame = T[i], T[i + 1]
        u = _unit0_map(f)
        image = Interval(u.evaluate(Ti.lo), u.evaluate(Ti.hi))
        if not (frame.lo < image.lo and image.hi < frame.hi and frame.lo < Ti.lo and Ti.hi < frame.hi):
            raise ClaimFailure([("containment", f"T_{i + 1}.f_{i + 1} = {image} not inside T_{i + 2} = {frame}")])
        partial = pl_invert(u.restrict(Ti.lo, Ti.hi))
        inner = extend_to_homeo(partial, frame)
        nodes = [(0, 0)] + list(inner.nodes) + [(1, 1)]
        a = PLHomeo(nodes)
        if not classify(a).in_Fprime:
            raise ClaimFailure([("alpha", f"alpha_{i + 1} is not in F'")])
        alphas.append(a)
        gs.append(special(rho, W, l, a) if not a.is_identity() else identity_element(rho))
    return alphas, gs


def _lift(e, K):
    return lift(e, K).table


def _centre(w, l):
    K = len(w) // 2
    return w[K - l:K + l + 1]


def _fixes(u, I):
    return u.restrict(I.lo, I.hi).is_identity()


def verify_claims(bundle):
    """Check every claim exactly.  Returns the facts; raises ClaimFailure naming each failed claim."""
    rho, W, l = bundle.rho, bundle.W, bundle.l
    Winv = formal_inverse(W)
    T, f, g = bundle.T, bundle.f, bundle.g
    fails = []
    results = {}

    def record(claim, ok, datum=""):
        results.setdefault(claim, True)
        if not ok:
            results[claim] = False
            fails.append((claim, datum))

    flipT = [Interval(1 - t.hi, 1 - t.lo) for t in T]

    # bundle invariants
    for i in range(3):
        a = bundle.triple.elements[i]
        Ji, Jn = bundle.J[i], bundle.J[i + 1]
        img = (evaluate(a, Ji.lo), evaluate(a, Ji.hi))
        record("J", Jn.lo < min(Ji.lo, img[0]) and max(Ji.hi, img[1]) < Jn.hi, f"J_{i + 1} u J_{i + 1}.a_{i + 1} not inside J_{i + 2}")
    record("J", 0 < T[3].lo and T[3].hi < 1, "J4.h not inside (0, 1)")
    for i in range(3):
        record("J", T[0].lo <= bundle.x[i] <= T[0].hi, f"x_{i + 1} not in T_1")
    record("parameters", bundle.m != 0 and rho.context_unit(0, bundle.k) == rho.context_unit(bundle.m, bundle.k), "unit m does not share the radius-k context of unit 0")
    record("parameters", rho.context_unit(bundle.m, l) not in (W, Winv) and len(W) == 2 * l + 1 and l > bundle.k, "radius-l contexts of units 0 and m")
    record("conjugation", product(list(f)).is_identity(), "f1 f2 f3 != id")

    # (1) Supp(g_i) inside I_{i+1}
    for i in range(3):
        table = _lift(g[i], max(g[i].k, l))
        for w, u in table.items():
            if u.is_identity():
                continue
            c = _centre(w, l)
            frame = T[i + 1] if c == W else (flipT[i + 1] if c == Winv else None)
            if frame is None:
                record("1", False, f"g_{i + 1} acts on a unit of context {c!r}")
                break
            for lo, hi in u.support_closure():
                if not (frame.lo <= lo and hi <= frame.hi):
                    record("1", False, f"g_{i + 1} support [{lo}, {hi}] not inside {frame}")
        record("1", True)

    # (2) <g1, g2, g3> fixes Z and everything outside I_4
    for i in range(3):
        for w, u in g[i].table.items():
            if u.ys[0] != 0 or u.ys[-1] != 1:
                record("2", False, f"g_{i + 1} moves an integer (context {w!r})")
                break
        record("2", True)

    # (3) <f_i, g_i> fixes m + x_i
    for i in range(3):
        p = bundle.m + bundle.x[i]
        record("3", evaluate(f[i], p) == p, f"f_{i + 1} moves m + x_{i + 1} = {p}")
        record("3", evaluate(g[i], p) == p, f"g_{i + 1} moves m + x_{i + 1} = {p}")

    # (4) f_i g_i fixes I_i pointwise
    fg = [then_compose(f[i], g[i]) for i in range(3)]
    for i in range(3):
        K = max(fg[i].k, l)
        for w, u in _lift(fg[i], K).items():
            c = _centre(w, l)
            if c == W and not _fixes(u, T[i]):
                record("4", False, f"f_{i + 1} g_{i + 1} moves T_{i + 1} on a unit of context W")
                break
            if c == Winv and not _fixes(u, flipT[i]):
                record("4", False, f"f_{i + 1} g_{i + 1} moves T_{i + 1}.iota on a unit of context W^-1")
                break
        record("4", True)

    # (5) commutations
    for a, b in ((2, 1), (2, 0), (1, 0)):
        ok = commutator(fg[a], g[b]).is_identity()
        record("5", ok, f"[f{a + 1}g{a + 1}, g{b + 1}] != id")

    # (6) the final identity
    record("6", equals(product(fg), product([g[2], g[1], g[0]])), "f1g1.f2g2.f3g3 != g3.g2.g1")

    bundle.claims = {c: ok for c, ok in sorted(results.items())}
    if fails:
        raise ClaimFailure(fails)
    return build_facts(bundle)


def build_facts(bundle):
    ev = ElementEvidence(bundle.elements())

    def fact(id, kind, **kw):
        fc = Fact(id, kind, **kw)
        fc.evidence = ev.digest(fc.names())
        return fc

    t1 = bundle.T[0]
    mid = as_exact((t1.lo + t1.hi) / 2)
    facts = [
        fact(f"fix-f{i}g{i}", "FixpointSubgroup", members=[(f"f{i}",), (f"g{i}",)],
             point=bundle.m + bundle.x[i - 1], note=f"<f{i}, g{i}> fixes m + x_{i}")
        for i in (1, 2, 3)
    ]
    facts += [
        fact("ab-f3g3-g2", "AbelianPair", members=[("f3", "g3"), ("g2",)], note="f3g3 fixes I_3, Supp g2 in I_3"),
        fact("ab-f3g3-g1", "AbelianPair", members=[("f3", "g3"), ("g1",)], note="f3g3 fixes I_3, Supp g1 in I_2"),
        fact("ab-f2g2-g1", "AbelianPair", members=[("f2", "g2"), ("g1",)], note="f2g2 fixes I_2, Supp g1 in I_2"),
        fact("fix-fg", "FixpointSubgroup", members=[("f1", "g1"), ("f2", "g2"), ("f3", "g3")], point=mid,
             note="<f_i g_i> fixes I_1 pointwise"),
        fact("identity", "GroupIdentity", lhs=("f1", "g1", "f2", "g2", "f3", "g3"), rhs=("g3", "g2", "g1"),
             note="f1g1.f2g2.f3g3 = f1f2f3.g3g2g1 = g3g2g1"),
        fact("fix-g", "FixpointSubgroup", members=[("g1",), ("g2",), ("g3",)], point=Dyadic(0),
             note="<g1, g2, g3> fixes every integer"),
    ]
    return facts


def build_certificate(bundle, facts):
    header = {
        "tool_version": __version__,
        "goal": "sigma(f1) sigma(f2) sigma(f3) = id",
        "assumptions": [
            "omega is the homogeneous representative of its class (taken as licensed)",
            "sigma restricted to a 2-boundedly acyclic subgroup is a homomorphism",
            "subgroups with a global fixpoint, abelian subgroups and cyclic subgroups are 2-boundedly acyclic",
        ],
        "conjugation": "f_i = a_i^h with a1 a2 a3 = id; homogeneous cocycles are conjugation invariant",
        "h_word": bundle.h_word,
    }
    if all(e.is_identity() for e in bundle.f + bundle.g):
        header["note"] = "trivial triple: sigma(id) = id by normalization"
        return Certificate([], [], [], header)
    tokens = [Token((n,)) for n in ("f1", "f2", "f3", "g3", "g2", "g1")]
    tokens += [Token((n,), True) for n in ("g1", "g2", "g3")]
    steps = [
        Step("MERGE", 2, "fix-f3g3"),
        Step("SWAP", 2, "ab-f3g3-g2"),
        Step("SWAP", 3, "ab-f3g3-g1"),
        Step("MERGE", 1, "fix-f2g2"),
        Step("SWAP", 1, "ab-f2g2-g1"),
        Step("MERGE", 0, "fix-f1g1"),
        Step("MERGE", 0, "fix-fg"),
        Step("MERGE", 0, "fix-fg"),
        Step("REWRITE", 0, "identity"),
        Step("SPLIT", 0, "fix-g", cut=2),
        Step("SPLIT", 0, "fix-g", cut=1),
        Step("CANCEL-AGAINST-TAIL", 2),
        Step("CANCEL-AGAINST-TAIL", 1),
        Step("CANCEL-AGAINST-TAIL", 0),
    ]
    return Certificate(tokens, facts, steps, header)


def run_pipeline(rho, triple, cfg=DEFAULT, h_word=None, budget=None):
    """Full construction, exact verification and certificate replay.

    Returns (bundle, certificate, replay_result).  Raises PipelineInconclusive
    when a search gives up, ClaimFailure when a check fails.
    """
    if not triple.check():
        raise ClaimFailure([("triple", "a1 a2 a3 != id")])
    b = WitnessBundle(rho, triple, cfg)
    b.fixed_points, b.J = initial_intervals(rho, triple, cfg)
    if h_word is not None:
        b.h, b.h_word = word_to_element(rho, h_word), list(h_word.split() if isinstance(h_word, str) else h_word)
        apply_h(rho, b.h, b.J[3], b.h_word)
    else:
        b.h, b.h_word = find_h(rho, b.J[3], cfg, budget)
    b.f = [conjugate(a, b.h) for a in triple.elements]
    b.T = [Interval(evaluate(b.h, j.lo), evaluate(b.h, j.hi)) for j in b.J]
    b.x = [as_exact(evaluate(b.h, y)) for y in b.fixed_points]
    b.k, b.m, b.l, b.W = choose_parameters(rho, b.f, cfg)
    b.alpha, b.g = build_correctors(rho, b.f, b.T, b.l, b.W)
    facts = verify_claims(b)
    cert = build_certificate(b, facts)
    result = replay(cert, ElementEvidence(b.elements()))
    return b, cert, result
