"""Fixture triples a1 a2 a3 = id used by the tests, the scripts and the CLI examples."""

from __future__ import annotations

from .dyadic import Dyadic
from .plmap import PLHomeo, thompson_x

QUARTER = Dyadic(1, 2)
THREE_QUARTERS = Dyadic(3, 2)

# found by proximal_search (seed 0, budget 4000) for triple B; maps J_4 = [1/8, 35/32] into (0, 1)
H_WORD_B = "chi1 zeta1 zeta1 zeta3 zeta3 zeta1 zeta3 zeta2 zeta1 chi1^-1"


def copy_on(f, lo, hi):
    """f (a map of [0, 1]) squeezed onto [lo, hi] with hi - lo a power of two, identity elsewhere."""
    L = hi - lo
    inner = [(lo + L * x, lo + L * y) for x, y in zip(f.xs, f.ys)]
    nodes = ([(0, 0)] if lo > 0 else []) + inner + ([(1, 1)] if hi < 1 else [])
    return PLHomeo(nodes)


def _lam(f):
    return {"lambda": f.to_json()}


def fixture_triples():
    """name -> (JSON triple spec, recorded h word or None)."""
    u1 = copy_on(thompson_x(0), QUARTER, THREE_QUARTERS)
    u2 = copy_on(thompson_x(1), QUARTER, THREE_QUARTERS)
    v = copy_on(thompson_x(0), QUARTER, Dyadic(1, 1))
    return {
        "identity": ({"triple": ["", "", ""]}, None),
        "A": ({"triple": [_lam(u1), _lam(u2), {"close": True}]}, None),
        "A2": ({"triple": [{"special": {"W": "babab", "l": 2, "map": v.to_json()}}, _lam(u2), {"close": True}]}, None),
        "C": ({"triple": ["chi2", "chi2", {"close": True}]}, None),
        "B": ({"triple": ["zeta1", "zeta2", {"close": True}]}, H_WORD_B),
    }
