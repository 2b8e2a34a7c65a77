import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from z2nsuper.errors import NotInvertible, SignatureMismatch
from z2nsuper.jets import Jet, format_jet, jet_compose, multi_indices, taylor_compose
from z2nsuper.textio import parse_jet

T = 5


def J(text, p=1, order=T, names=None):
    return parse_jet(text, p, order, names or (["x"] if p == 1 else ["x", "y"]))


def test_add_examples():
    assert J("1 + x") + J("1 - x") == J("2")
    a = J("3*x^2 - 1/2")
    assert a + Jet.zero(1, T) == a
    assert J("x^2") + J("x^2") == J("2*x^2")


def test_mul_examples():
    assert J("1 + x") * J("1 - x") == J("1 - x^2")
    assert J(f"x^{T}") * J("x") == Jet.zero(1, T)
    assert J("1 + x") * J("1 + x") == J("1 + 2*x + x^2")


def test_mismatched_jets():
    with pytest.raises(SignatureMismatch):
        Jet.constant(1, 1, 3) + Jet.constant(1, 1, 4)
    with pytest.raises(SignatureMismatch):
        Jet.constant(1, 1, 3) * Jet.constant(1, 2, 3)


def test_derivative_examples():
    assert J("x^2").derivative(0) == J("2*x")
    assert J("7").derivative(0) == Jet.zero(1, T)
    assert J("x*y", p=2).derivative(0) == J("y", p=2)
    with pytest.raises(IndexError):
        J("x").derivative(1)


def test_compose_examples():
    assert jet_compose(J("x^2"), [J("x")]) == J("x^2")
    assert jet_compose(J("1 + x"), [J("x + x^2")]) == J("1 + x + x^2")
    y1y2 = Jet(2, T, {(1, 1): 1})
    assert jet_compose(y1y2, [J("x"), J("x")]) == J("x^2")


def test_compose_requires_centered_arguments():
    with pytest.raises(ValueError):
        jet_compose(J("x"), [J("1 + x")])


def test_invert_examples():
    geometric = Jet(1, T, {(k,): 1 for k in range(T + 1)})
    assert J("1 - x").inverse() == geometric
    assert J("2").inverse() == J("1/2")
    with pytest.raises(NotInvertible):
        J("x").inverse()


def test_valuation_examples():
    assert J("x^2 + x^3").valuation() == 2
    assert Jet.zero(1, T).valuation() == math.inf
    assert J("5").valuation() == 0


def test_construction_truncates_and_normalizes():
    j = Jet(1, 2, {(3,): 1, (1,): 0, (2,): Fraction(1, 2)})
    assert dict(j.terms) == {(2,): Fraction(1, 2)}
    assert Jet(1, 2, {(1,): 1}) != Jet(1, 3, {(1,): 1})


def test_format():
    assert format_jet(J("1 - x + 2/3*x^2")) == "1 - x1 + 2/3*x1^2"
    assert format_jet(Jet.zero(2, 3)) == "0"


# property tests

P_ORDER = st.tuples(st.integers(1, 3), st.integers(0, 5))
RATS = st.builds(Fraction, st.integers(-5, 5), st.integers(1, 4))


@st.composite
def jets(draw, p, order, centered=False, unit=False):
    exps = [e for e in multi_indices(p, order) if not (centered and sum(e) == 0)]
    terms = draw(st.dictionaries(st.sampled_from(exps), RATS, max_size=4)) if exps else {}
    j = Jet(p, order, terms)
    if unit and not j.constant_term():
        j = j + 1
    return j


@st.composite
def jet_triples(draw):
    p, order = draw(P_ORDER)
    return tuple(draw(jets(p, order)) for _ in range(3))


@given(jet_triples())
def test_ring_axioms(abc):
    a, b, c = abc
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a


@st.composite
def unit_jets(draw):
    p, order = draw(P_ORDER)
    return draw(jets(p, order, unit=True))


@given(unit_jets())
def test_inverse_is_exact(a):
    one = Jet.constant(1, a.p, a.order)
    assert a * a.inverse() == one


@given(jet_triples())
def test_valuation_superadditive(abc):
    a, b, _ = abc
    bound = min(a.order + 1, a.valuation() + b.valuation())
    assert (a * b).valuation() >= bound


@st.composite
def compositions(draw):
    u = draw(st.integers(1, 3))
    p = draw(st.integers(1, 3))
    order = draw(st.integers(0, 5))
    g = draw(jets(u, order))
    args = [draw(jets(p, order, centered=True)) for _ in range(u)]
    return g, args


@settings(max_examples=60)
@given(compositions())
def test_compose_matches_taylor_sum(case):
    g, args = case
    assert jet_compose(g, args) == taylor_compose(g, args)


def test_compose_matches_taylor_sum_random_batch():
    rng = random.Random(3)
    for _ in range(50):
        u, p, order = rng.randint(1, 3), rng.randint(1, 2), rng.randint(1, 5)
        exps = list(multi_indices(u, order))
        g = Jet(u, order, {e: rng.randint(-3, 3) for e in rng.sample(exps, min(3, len(exps)))})
        args = [
            Jet(p, order, {e: rng.randint(-2, 2) for e in multi_indices(p, 2) if sum(e) >= 1})
            for _ in range(u)
        ]
        assert jet_compose(g, args) == taylor_compose(g, args)
