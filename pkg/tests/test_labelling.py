import pytest
from hypothesis import given, strategies as st

from grho.dyadic import Dyadic
from grho.labelling import (
    Labelling,
    LabellingError,
    LWord,
    PeriodicLabelling,
    formal_inverse,
    iota,
    recurrence_gap,
    verify_quasi_periodicity,
)


def naive_levels(n):
    inv = {"a": "A", "A": "a", "b": "B", "B": "b"}
    ws = ["ab"]
    while len(ws) < n:
        w = ws[-1]
        x = "a" + "".join(inv[c] for c in reversed(w)) + "b"
        ws.append(w + w + x + w + w)
    return ws


LEVELS = naive_levels(6)


def naive_letter(p2):
    """Letter at doubled position p2 from the naive level-6 word (prefix / suffix limits)."""
    w = LEVELS[-1]
    return w[p2] if p2 >= 0 else w[len(w) + p2]


def test_levels(rho):
    assert rho.level(1) == "ab"
    assert rho.level(2) == "ababaBAbabab"
    for k in range(1, 6):
        assert rho.level(k) == LEVELS[k - 1]
        nxt = rho.level(k + 1)
        assert nxt.startswith(rho.level(k)) and nxt.endswith(rho.level(k))
        assert len(nxt) == 5 * len(rho.level(k)) + 2


def test_letter_examples(rho):
    h = Dyadic(1, 1)
    assert rho.letter(0) == "a" and rho.letter(h) == "b"
    assert rho.letter(Dyadic(5, 1)) == "B" and rho.letter(3) == "A"
    assert rho.letter(-h) == "b" and rho.letter(-1) == "a"


@given(st.integers(-3000, 3000))
def test_letters_match_naive(rho, d):
    assert rho.letter_d(d) == naive_letter(d)


@given(st.integers(-1000, 1000), st.integers(0, 12))
def test_context_words(rho, n, k):
    w = rho.context_unit(n, k)
    assert len(w) == 2 * k + 1
    assert w == "".join(naive_letter(2 * n + 1 + j) for j in range(-k, k + 1))
    LWord(w, (k + 1) % 2)


def test_context_examples(rho):
    q = Dyadic(1, 2)
    assert rho.context_point(q, 0) == "b"
    assert rho.context_point(q, 1) == "aba"
    assert rho.context_point(3 + q, 4) == rho.context_point(Dyadic(15, 2), 4)
    assert rho.context_interval(0, 1, 1) == "aba"
    assert rho.context_interval(1, 2, 1) == "aba"
    assert rho.context_interval(0, 1, 2) == "babab"
    assert rho.context_interval(1, 2, 2) == "babaB"


def test_formal_inverse():
    assert formal_inverse("ab") == "BA"
    assert formal_inverse("aba")[1] == "B"


@given(st.text(alphabet="abAB", max_size=30))
def test_formal_inverse_involution(w):
    assert formal_inverse(formal_inverse(w)) == w


def test_unit_class_examples(rho):
    assert rho.unit_class(0, rho.context_unit(0, 3)) == "Pos"
    assert rho.unit_class(4, "babab") == "Pos"


@given(st.integers(-500, 500), st.integers(-500, 500), st.integers(0, 6))
def test_unit_class_exclusive(rho, n, m, k):
    w = rho.context_unit(m, k)
    c = rho.unit_class(n, w)
    assert c in ("Pos", "Neg", "Neither")
    # a context never equals its own formal inverse (the centre letter flips)
    assert w != formal_inverse(w)


def test_find_unit_examples(rho):
    assert rho.find_unit_with_context(rho.context_unit(0, 1), exclude={0}) == 1
    assert rho.find_unit_with_context("b", exclude={0}) == 1
    with pytest.raises(LabellingError):
        rho.find_unit_with_context("b", exclude=set(range(-3, 4)), search_radius=3)


def test_iota():
    assert iota(Dyadic(1, 2)) == Dyadic(3, 2)
    assert iota(Dyadic(3, 1)) == Dyadic(3, 1)
    assert iota(2) == 3


def test_inverse_closure_length_two(rho):
    rep = verify_quasi_periodicity(rho, 2, 3)
    assert rep.inverse_closure
    assert "BA" in rho.level(2)


def test_no_small_period(rho):
    assert verify_quasi_periodicity(rho, 3, 6, max_period=64).min_nonperiod is None


def test_periodic_double():
    p = PeriodicLabelling("abaB")
    rep = verify_quasi_periodicity(p, 3, 3, max_period=16)
    assert rep.min_nonperiod == 4


def test_recurrence_gap_oracle():
    # every length-1 factor of "aab" recurs within any window of 3 letters ... except "b" needs the tail
    assert recurrence_gap("abab", 1) == 2
    assert recurrence_gap("aaaa", 2) == 2


def test_contexts_are_saturated(rho):
    for k in (0, 3, 7):
        words = rho.contexts(k)
        win = rho.window(7)
        n = len(win) // 2
        seen = {rho.context_unit(m, k) for m in range(-n // 2 + k, n // 2 - k)}
        assert seen == set(words)


def test_disk_cache(tmp_path):
    lab = Labelling("ab", cache_dir=str(tmp_path))
    w = lab.level(4)
    again = Labelling("ab", cache_dir=str(tmp_path))
    assert again.level(4) == w
    assert any(p.name.startswith("level-ab-") for p in tmp_path.iterdir())


def test_bad_seed():
    with pytest.raises(LabellingError):
        Labelling("ba")
