"""Hypothesis strategies shared by the test modules."""

from hypothesis import strategies as st

from grho.dyadic import Dyadic
from grho.element import GENERATOR_NAMES
from grho.plmap import PLHomeo, invert, then_compose, thompson_x

TOKENS = [g + s for g in GENERATOR_NAMES for s in ("", "^-1")]


def dyadics(lo=-8, hi=8, max_e=8):
    return st.builds(
        lambda e, m: Dyadic(m, e),
        st.integers(0, max_e),
        st.integers(lo * 2**max_e, hi * 2**max_e),
    ).filter(lambda d: lo <= d <= hi)


def unit_dyadics(max_e=10):
    return st.integers(0, max_e).flatmap(lambda e: st.integers(0, 2**e).map(lambda m: Dyadic(m, e)))


def words(max_len=6):
    return st.lists(st.sampled_from(TOKENS), max_size=max_len)


_XS = [thompson_x(i) for i in range(4)]
_XS += [invert(x) for x in _XS]


def f_elements(max_len=5):
    """Random elements of Thompson's group F as products of x_0..x_3 and inverses."""
    return st.lists(st.sampled_from(_XS), min_size=0, max_size=max_len).map(
        lambda fs: then_compose(*fs) if fs else PLHomeo([(0, 0), (1, 1)]))


def fprime_elements(max_len=4):
    """Elements of F' supported inside (1/4, 3/4): squeezed copies of random F elements."""
    def squeeze(f):
        q = Dyadic(1, 2)
        h = Dyadic(1, 1)
        return PLHomeo([(0, 0)] + [(q + h * x, q + h * y) for x, y in zip(f.xs, f.ys)] + [(1, 1)])

    return f_elements(max_len).map(squeeze)
