import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from grho.cocycle import (
    Certificate,
    ClosureError,
    Cochain,
    ElementEvidence,
    ExtensionElement,
    Fact,
    ReplayError,
    Step,
    Token,
    canonical_section,
    check_conjugation_invariance,
    classify,
    cyclic,
    delta,
    dihedral,
    direct_product,
    extension_inverse,
    extension_product,
    integer_window,
    quaternion,
    random_normalized_cocycle,
    replay,
    section_to_cocycle,
    small_groups,
)
from grho.element import generator

GROUPS = small_groups()


def random_cochain(G, n, rng):
    return Cochain.from_function(G, n, lambda *t: Fraction(rng.randint(-5, 5), rng.choice((1, 3))))


@pytest.mark.parametrize("G", GROUPS, ids=lambda G: G.name)
def test_group_laws(G):
    assert G.check_laws()


def test_nonabelian_oracles():
    Q = quaternion()
    i, j, k = (1, 1), (1, 2), (1, 3)
    assert Q.mul(i, j) == k and Q.mul(j, i) == (-1, 3)
    assert Q.mul(i, i) == (-1, 0) and len(Q) == 8
    D = dihedral(3)
    r, s = (1, 0), (0, 1)
    assert D.mul(s, r) == D.mul(D.inv(r), s) and D.mul(r, s) != D.mul(s, r)
    assert D.conj(r, s) == D.inv(r)


@pytest.mark.parametrize("n", [0, 1, 2])
@pytest.mark.parametrize("G", [cyclic(3), dihedral(3), quaternion(), direct_product(cyclic(2), cyclic(2))], ids=lambda G: G.name)
def test_delta_squared(G, n):
    c = random_cochain(G, n, random.Random(n))
    assert delta(delta(c)).is_zero()


def test_delta_zero_and_homomorphisms():
    Z = integer_window(12)
    assert delta(Cochain(Z, 0, {(): Fraction(7)})).is_zero()
    hom = Cochain.from_function(Z, 1, lambda m: 3 * m)
    assert delta(hom).is_zero()
    sq = Cochain.from_function(Z, 1, lambda m: m * m)
    assert not delta(sq).is_zero()


def test_integer_window_closure():
    Z = integer_window(3)
    with pytest.raises(ClosureError):
        Z.mul(2, 2)


def test_product_cocycle_not_homogeneous():
    Z = integer_window(6)
    w = Cochain.from_function(Z, 2, lambda m, n: m * n)
    fl = classify(w)
    assert fl.cocycle and fl.normalized and not fl.homogeneous
    g, x, y = fl.homogeneity_witness
    assert w(x, y) != 0
    assert fl.partial  # powers leave the window
    assert not check_conjugation_invariance(w).homogeneous


@given(st.dictionaries(st.sampled_from([((0, 1), (1, 0)), ((1, 0), (0, 1)), ((1, 1), (1, 0)), ((0, 1), (1, 1))]),
                       st.integers(-4, 4)))
def test_homogeneous_implies_normalized(vals):
    V = direct_product(cyclic(2), cyclic(2))
    w = Cochain.from_function(V, 2, lambda x, y: vals.get((x, y), 0))
    fl = classify(w)
    assert fl.homogeneous
    assert fl.normalized


def test_zero_is_conjugation_invariant():
    D = dihedral(4)
    w = Cochain.from_function(D, 2, lambda x, y: 0)
    rep = check_conjugation_invariance(w)
    assert rep.ok and rep.checked == len(D) ** 3


@pytest.mark.parametrize("seed", range(50))
def test_section_round_trip(seed):
    rng = random.Random(seed)
    G = GROUPS[seed % len(GROUPS)]
    w = random_normalized_cocycle(G, rng)
    fl = classify(w)
    assert fl.cocycle and fl.normalized
    assert section_to_cocycle(canonical_section(w), w).values == w.values


@pytest.mark.parametrize("G", [dihedral(3), quaternion(), cyclic(5)], ids=lambda G: G.name)
def test_perturbed_section_is_coboundary(G):
    rng = random.Random(1)
    w = random_normalized_cocycle(G, rng)
    phi = {g: Fraction(rng.randint(-9, 9), 2) for g in G.universe}
    phi[G.identity] = Fraction(0)
    sigma = {g: ExtensionElement(phi[g], g) for g in G.universe}
    diff = section_to_cocycle(sigma, w) - w
    assert diff.values == delta(Cochain(G, 1, {(g,): v for g, v in phi.items()})).values


def test_extension_group_laws():
    G = quaternion()
    w = random_normalized_cocycle(G, random.Random(3))
    E = [ExtensionElement(Fraction(s), g) for g in G.universe for s in (-1, 0, 2)]
    e = ExtensionElement(Fraction(0), G.identity)
    for x in E:
        assert extension_product(x, extension_inverse(x, w), w) == e
        assert extension_product(e, x, w) == x
        for y in E[::5]:
            for z in E[::7]:
                assert extension_product(extension_product(x, y, w), z, w) == \
                    extension_product(x, extension_product(y, z, w), w)
    bad = Cochain.from_function(G, 2, lambda x, y: 1)
    with pytest.raises(ValueError):
        extension_product(E[0], E[1], bad, check=True)


# -- replay --------------------------------------------------------------------------------


@pytest.fixture(scope="module")
def evidence(rho):
    return ElementEvidence({"a": generator(rho, "zeta1"), "b": generator(rho, "zeta2"),
                            "c": generator(rho, "chi1")})


def test_swap_needs_commuting_pair(evidence):
    cert = Certificate([Token(("a",)), Token(("b",))], [Fact("ab", "AbelianPair", members=[("a",), ("b",)])],
                       [Step("SWAP", 0, "ab")])
    res = replay(cert, evidence)
    assert not res.accepted and res.failed_step == 0 and "commute" in res.reason


def test_empty_script_rejected(evidence):
    res = replay(Certificate([Token(("a",))], [], []), evidence)
    assert not res.accepted and "residue" in res.reason
    assert replay(Certificate([], [], []), evidence).accepted


def test_cancel_and_invert(evidence):
    cert = Certificate([Token(("a", "b")), Token(("a", "b"), True)], [], [Step("CANCEL-AGAINST-TAIL", 0)])
    assert replay(cert, evidence).accepted
    cert = Certificate([Token(("a",)), Token(("b",), True)], [], [Step("CANCEL-AGAINST-TAIL", 0)])
    assert not replay(cert, evidence).accepted
    cert = Certificate([Token(("a",), True)], [Fact("cyc", "CyclicPower", members=[("a",)])], [Step("INVERT", 0, "cyc")])
    res = replay(cert, evidence)
    assert res.trace[-1].endswith("sigma(a^-1)")


def test_merge_membership_is_syntactic(evidence):
    fix = Fact("fx", "FixpointSubgroup", members=[("a",), ("b",)], point=0)
    cert = Certificate([Token(("a",)), Token(("b", "a"))], [fix], [Step("MERGE", 0, "fx")])
    res = replay(cert, evidence)
    assert res.failed_step is None or res.failed_step == 1  # merged, then residue
    assert "residue" in res.reason
    cert = Certificate([Token(("a",)), Token(("c",))], [fix], [Step("MERGE", 0, "fx")])
    assert "not covered" in replay(cert, evidence).reason


def test_wrong_licence_kind(evidence):
    fact = Fact("id", "GroupIdentity", lhs=("a",), rhs=("a",))
    cert = Certificate([Token(("a",)), Token(("a",))], [fact], [Step("MERGE", 0, "id")])
    assert "cannot be licensed" in replay(cert, evidence).reason
    cert = Certificate([Token(("a",))], [], [Step("REWRITE", 0, "missing")])
    assert "unknown fact" in replay(cert, evidence).reason


def test_certificate_json_round_trip(evidence):
    cert = Certificate([Token(("a",), True)], [Fact("f", "FixpointSubgroup", members=[("a",)], point=Fraction(1, 4))],
                       [Step("SPLIT", 0, "f", cut=1)], {"goal": "x"})
    assert Certificate.from_json(cert.to_json()).to_json() == cert.to_json()
    with pytest.raises(ReplayError):
        Certificate.from_json({"tokens": []})
