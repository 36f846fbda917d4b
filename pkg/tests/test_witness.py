import dataclasses

import pytest

from grho.cocycle import ElementEvidence, replay
from grho.dyadic import Dyadic
from grho.element import generator, invert, then_compose, word_to_element
from grho.fixtures import H_WORD_B, fixture_triples
from grho.plmap import Interval
from grho.witness import (
    ClaimFailure,
    PipelineInconclusive,
    Triple,
    initial_intervals,
    run_pipeline,
    triple_from_json,
    verify_claims,
)

FIXTURES = fixture_triples()


@pytest.fixture(scope="module")
def runs(rho):
    out = {}
    for name, (spec, h) in FIXTURES.items():
        out[name] = run_pipeline(rho, triple_from_json(rho, spec), h_word=h)
    return out


@pytest.mark.parametrize("name", list(FIXTURES))
def test_fixture_accepted(runs, name):
    bundle, cert, res = runs[name]
    assert res.accepted, res.reason
    assert all(bundle.claims.values())
    assert set(bundle.claims) >= {"1", "2", "3", "4", "5", "6"}


def test_identity_bundle(runs):
    b, cert, res = runs["identity"]
    assert [str(j) for j in b.J] == ["[7/16, 9/16]", "[13/32, 19/32]", "[3/8, 5/8]", "[11/32, 21/32]"]
    assert all(e.is_identity() for e in b.f + b.g)
    assert cert.steps == [] and res.steps_replayed == 0


def test_parameters_example(runs, rho):
    b = runs["identity"][0]
    assert (b.k, b.m, b.l, b.W) == (1, 1, 2, "babab")
    assert rho.context_unit(0, 1) == rho.context_unit(1, 1)
    assert rho.context_unit(1, 2) != "babab"


def test_nontrivial_run(runs, rho):
    b, cert, res = runs["B"]
    assert not b.h.is_identity() and b.h_word == H_WORD_B.split()
    assert all(0 < t.lo and t.hi < 1 for t in b.T)
    assert len(cert.tokens) == 9 and len(cert.steps) == 14
    for i in range(3):
        assert b.T[0].lo <= b.x[i] <= b.T[0].hi
    # claim (6) from scratch
    fg = [then_compose(b.f[i], b.g[i]) for i in range(3)]
    lhs = then_compose(then_compose(fg[0], fg[1]), fg[2])
    rhs = then_compose(then_compose(b.g[2], b.g[1]), b.g[0])
    assert then_compose(lhs, invert(rhs)).is_identity()


def test_j_nesting(rho):
    spec, _ = FIXTURES["B"]
    t = triple_from_json(rho, spec)
    ys, J = initial_intervals(rho, t)
    assert all(J[0].lo < y < J[0].hi for y in ys)  # fixed points may be non-dyadic
    assert J[3] == Interval(Dyadic(1, 3), Dyadic(35, 5))  # [1/8, 35/32]


def test_budget_zero_inconclusive(rho):
    spec, _ = FIXTURES["B"]
    with pytest.raises(PipelineInconclusive):
        run_pipeline(rho, triple_from_json(rho, spec), budget=0)


def test_bad_triple(rho):
    z = generator(rho, "zeta1")
    t = Triple(z, z, z, ["zeta1"] * 3)
    with pytest.raises(ClaimFailure) as ei:
        run_pipeline(rho, t)
    assert ei.value.claims == ["triple"]


def test_corrupted_g2_fails_claim5(runs, rho):
    b = dataclasses.replace(runs["B"][0])
    b.g = list(b.g)
    b.g[1] = then_compose(b.g[1], word_to_element(rho, "zeta1"))
    with pytest.raises(ClaimFailure) as ei:
        verify_claims(b)
    assert "5" in ei.value.claims
    assert b.claims["5"] is False


def _first_citing(cert, fid):
    return next(i for i, s in enumerate(cert.steps) if s.fact == fid)


@pytest.mark.parametrize("fid", ["fix-f1g1", "fix-f2g2", "fix-f3g3", "ab-f3g3-g2", "ab-f3g3-g1",
                                 "ab-f2g2-g1", "fix-fg", "identity", "fix-g"])
def test_single_fact_corruption(runs, fid):
    b, cert, _ = runs["B"]
    facts = []
    for f in cert.facts:
        if f.id == fid:
            f = dataclasses.replace(f, evidence="0" * 64)
        facts.append(f)
    bad = dataclasses.replace(cert, facts=facts)
    res = replay(bad, ElementEvidence(b.elements()))
    assert not res.accepted
    assert res.failed_step == _first_citing(cert, fid)
    assert fid in res.reason


def test_semantic_corruption(runs, rho):
    """Points that are not fixed, non-commuting pairs and false identities are caught."""
    b, cert, _ = runs["B"]
    ev = ElementEvidence(b.elements())
    cases = {
        "fix-f1g1": dict(point=b.m + b.x[0] + Dyadic(1, 6), evidence=""),
        "ab-f3g3-g2": dict(members=[("f3",), ("f1",)], evidence=""),
        "identity": dict(rhs=("g1", "g2", "g3"), evidence=""),
    }
    for fid, change in cases.items():
        facts = [dataclasses.replace(f, **change) if f.id == fid else f for f in cert.facts]
        res = replay(dataclasses.replace(cert, facts=facts), ev)
        assert not res.accepted and res.failed_step == _first_citing(cert, fid), (fid, res.reason)


def test_tampered_elements_rejected(runs, rho):
    b, cert, _ = runs["B"]
    els = b.elements()
    els["g1"] = then_compose(els["g1"], word_to_element(rho, "zeta2"))
    res = replay(cert, ElementEvidence(els))
    assert not res.accepted and "hash" in res.reason
