from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from grho.dyadic import Dyadic
from grho.plmap import (
    Interval,
    PLError,
    PLHomeo,
    classify,
    default_nus,
    dyadic_interpolate,
    extend_to_homeo,
    flip,
    germ,
    identity,
    invert,
    then_compose,
    thompson_x,
    transport,
)

from strategies import f_elements, unit_dyadics

D = Dyadic.parse
x0 = thompson_x(0)


def naive_eval(f, x):
    """Linear interpolation between nodes with Fractions, independent of PLHomeo.evaluate."""
    x = Fraction(str(x)) if not isinstance(x, Fraction) else x
    pts = [(Fraction(str(a)), Fraction(str(b))) for a, b in f.nodes]
    for (a, b), (c, d) in zip(pts, pts[1:]):
        if a <= x <= c:
            return b + (d - b) * (x - a) / (c - a)
    raise ValueError


def test_x0_evaluation():
    assert x0.evaluate(D("1/2")) == D("1/4")
    assert x0.evaluate(1) == 1
    assert identity().evaluate(D("1/2")) == D("1/2")
    with pytest.raises(PLError):
        x0.evaluate(2)


def test_composition_examples():
    assert then_compose(x0, identity()) == x0
    assert then_compose(x0, invert(x0)).is_identity()
    # (3/4) x0 = 1/2 and (1/2) x0 = 1/4
    assert then_compose(x0, x0).evaluate(D("3/4")) == D("1/4")


def test_invert_x0_slopes():
    assert [2**j if j >= 0 else Fraction(1, 2**-j) for j in invert(x0).logs] == [2, 1, Fraction(1, 2)]


def test_classify_examples():
    assert classify(identity()) == (True, True, True)
    assert classify(x0) == (True, False, False)
    nu1, nu2, nu3 = default_nus()
    assert classify(nu1) == (True, True, False)
    assert germ(nu1, 0)[1] == -1 and germ(nu1, 1)[0] == -1
    assert classify(nu2).in_Fprime and classify(nu3).in_Fprime


def test_germ_examples():
    assert germ(identity(), D("1/2")) == (0, 0)
    assert germ(x0, 0) == (None, -1)


def test_transport_examples():
    t = transport(identity(), Interval(3, 4))
    assert t.is_identity() and t.domain == Interval(3, 4)
    assert transport(x0, Interval(0, 1)) == x0
    g = transport(x0, Interval(0, 1), "reverse")
    assert g.evaluate(D("1/4")) == D("1/2")
    assert g == flip(x0)


def test_interpolate_examples():
    assert dyadic_interpolate(Interval(0, 1), Interval(0, 1)).is_identity()
    s = dyadic_interpolate(Interval(0, D("1/4")), Interval(0, D("1/2")))
    assert list(s.logs) == [1]
    s = dyadic_interpolate(Interval(0, D("3/8")), Interval(0, D("1/4")))
    assert s.nodes == PLHomeo([(0, 0), (D("1/4"), D("1/8")), (D("3/8"), D("1/4"))]).nodes


def test_extend_examples():
    e = extend_to_homeo(identity(D("1/4"), D("1/2")), Interval(0, 1))
    assert e.is_identity()
    p = PLHomeo([(D("1/4"), D("1/4")), (D("3/8"), D("1/2"))])
    e = extend_to_homeo(p, Interval(0, 1))
    assert e.evaluate(0) == 0 and e.evaluate(1) == 1
    for x in (D("1/4"), D("5/16"), D("3/8")):
        assert e.evaluate(x) == p.evaluate(x)
    assert classify(e).in_F


def test_rejects_bad_nodes():
    with pytest.raises(PLError):
        PLHomeo([(0, 0), (1, 3)])  # slope 3
    with pytest.raises(PLError):
        PLHomeo([(0, 1), (1, 0)])


@given(f_elements(), unit_dyadics())
def test_evaluate_matches_interpolation(f, x):
    assert Fraction(str(f.evaluate(x))) == naive_eval(f, x)


@given(f_elements(), f_elements(), unit_dyadics())
def test_composition_is_pointwise(f, g, x):
    assert then_compose(f, g).evaluate(x) == g.evaluate(f.evaluate(x))


@given(f_elements())
def test_inverse_and_canonical_form(f):
    assert invert(invert(f)) == f
    assert then_compose(f, invert(f)).is_identity()
    assert all(a != b for a, b in zip(f.logs, f.logs[1:]))


@given(f_elements(), f_elements())
def test_germ_additive_at_common_fixed_point(f, g):
    for p in (0, 1):
        a, b = germ(f, p), germ(g, p)
        c = germ(then_compose(f, g), p)
        side = 1 if p == 0 else 0
        assert c[side] == a[side] + b[side]


def _interval_pairs():
    ends = st.tuples(st.integers(-64, 64), st.integers(1, 64), st.integers(0, 5))
    return st.tuples(ends, ends).map(
        lambda p: tuple(Interval(Dyadic(a, e), Dyadic(a + l, e)) for a, l, e in p))


@given(_interval_pairs())
def test_interpolate_properties(pair):
    src, dst = pair
    s = dyadic_interpolate(src, dst)
    assert s.xs[0] == src.lo and s.xs[-1] == src.hi
    assert s.ys[0] == dst.lo and s.ys[-1] == dst.hi
    assert all(a < b for a, b in zip(s.ys, s.ys[1:]))
