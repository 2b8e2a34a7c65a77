import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from z2nsuper.errors import NotHomogeneous, NotInvertible, SignatureMismatch
from z2nsuper.grading import DegreeVector, commutation_sign
from z2nsuper.jets import Jet
from z2nsuper.series import FormalSignature, Series, naive_product_oracle, series_mul
from z2nsuper.textio import SessionHeader, parse_series

from randgen import Z22_SIGMA, QUATERNION_SIGMA, random_series, random_signature
from strategies import homogeneous_series, series, signatures, with_signature

D = DegreeVector


def z22_header(T=6):
    return SessionHeader(2, 1, 3, T, Z22_SIGMA, ("x",), ("xi", "eta", "th"))


def super_header(T=4):
    # two odd variables of the same degree: they anticommute
    return SessionHeader(1, 1, 2, T, (D((1,)), D((1,))), ("x",), ("xi", "eta"))


def quaternion_header(T=3):
    return SessionHeader(3, 0, 3, T, QUATERNION_SIGMA, (), ("i", "j", "k"))


def P(header, text):
    return parse_series(header, text)


# signature


def test_signature_rejects_zero_degree():
    with pytest.raises(ValueError):
        FormalSignature(2, 1, (D((0, 0)),), 3)
    with pytest.raises(ValueError):
        FormalSignature(2, 1, (D((1,)),), 3)
    with pytest.raises(ValueError):
        FormalSignature(1, 1, (D((1,)),), -1)


def test_dimension_counts():
    assert z22_header().signature.dimension == (1, 1, 1)
    sig = FormalSignature(2, 0, (D((1, 1)), D((0, 1)), D((1, 1))), 2)
    assert sig.dimension == (1, 0, 2)


def test_odd_exponent_rejected_in_construction():
    sig = z22_header().signature
    with pytest.raises(ValueError):
        Series(sig, {(2, 0, 0): 1})


# products


def test_quaternion_anticommutation():
    h = quaternion_header()
    assert P(h, "j") * P(h, "i") == -(P(h, "i") * P(h, "j"))
    assert (P(h, "i") * P(h, "j")).degree() == D((0, 1, 1))


def test_odd_square_vanishes():
    h = z22_header()
    assert P(h, "xi") * P(h, "xi") == 0
    assert P(h, "eta*eta") == 0


def test_anticommuting_pair_square_vanishes():
    # xi eta xi eta = -xi^2 eta^2 = 0
    h = super_header()
    xe = P(h, "xi*eta")
    assert xe * xe == 0
    assert P(h, "eta*xi") == -xe


def test_mixed_degree_odd_variables_commute():
    # <(0,1),(1,0)> = 0
    h = z22_header()
    assert P(h, "eta*xi") == P(h, "xi*eta")
    assert P(h, "th*xi") == -P(h, "xi*th")


def test_nonzero_degree_even_is_not_nilpotent():
    h = z22_header(T=4)
    th = P(h, "th")
    assert th * th != 0
    assert th**4 != 0
    assert th**5 == 0  # beyond the truncation order


def test_add_neg_scale():
    h = z22_header()
    a = P(h, "1 + x*xi - 2*th^2")
    assert a + 0 == a
    assert a + (-a) == 0
    assert P(h, "xi").scale(2) == P(h, "2*xi")
    assert 2 * P(h, "xi") == P(h, "2*xi")


def test_signature_mismatch():
    a = z22_header(4).signature.one()
    b = z22_header(5).signature.one()
    with pytest.raises(SignatureMismatch):
        a + b
    with pytest.raises(SignatureMismatch):
        a * b
    with pytest.raises(SignatureMismatch):
        naive_product_oracle(a, b)


def test_oracle_examples():
    h = quaternion_header()
    i, j = P(h, "i"), P(h, "j")
    assert naive_product_oracle(i, j) == series_mul(i, j)
    assert naive_product_oracle(j, i) == series_mul(j, i)
    a = P(z22_header(), "(1 + x)*th*xi + eta")
    assert naive_product_oracle(a, a.signature.one()) == a


# decomposition


def test_eight_block_decomposition():
    """Each of the eight monomial families lands in its expected degree."""
    h = z22_header(T=8)
    families = {
        "th^{a}": (0, 0),
        "th^{b}*xi*eta": (0, 0),
        "th^{a}*xi": (0, 1),
        "th^{b}*eta": (0, 1),
        "th^{a}*eta": (1, 0),
        "th^{b}*xi": (1, 0),
        "th^{b}": (1, 1),
        "th^{a}*xi*eta": (1, 1),
    }
    total = h.signature.zero()
    for r in range(3):
        for fam, deg in families.items():
            mono = P(h, fam.format(a=2 * r, b=2 * r + 1))
            assert mono.degree() == D(deg)
            total = total + mono
    comps = total.components()
    assert list(comps) == [D((0, 0)), D((0, 1)), D((1, 0)), D((1, 1))]
    assert sum(comps.values(), h.signature.zero()) == total
    assert comps[D((0, 0))] == sum(
        (P(h, f"th^{2 * r} + th^{2 * r + 1}*xi*eta") for r in range(3)), h.signature.zero()
    )


def test_components_examples():
    h = z22_header()
    s = P(h, "x*xi + 2*th*eta")
    assert s.components() == {D((0, 1)): s}
    two = P(h, "xi + eta").components()
    assert set(two) == {D((0, 1)), D((1, 0))}


def test_degree_of():
    h = z22_header()
    assert P(h, "th^2").degree() == D((0, 0))
    assert h.signature.zero().degree() == D((0, 0))
    with pytest.raises(NotHomogeneous):
        P(h, "xi + eta").degree()


def test_base_projection():
    h = z22_header()
    assert P(h, "1 + x + x*xi").base_projection() == P(h, "1 + x").base_projection()
    assert P(h, "x*xi + th").base_projection() == Jet.zero(1, 6)
    f = P(h, "(1 + x^2) + 3*th^2 + x*th*xi*eta + (2 - x)*th*xi + eta")
    assert f.base_projection() == Jet(1, 6, {(0,): 1, (2,): 1})


# filtrations


def test_j_adic_order():
    h = z22_header()
    assert P(h, "x*xi + xi*eta").j_adic_order() == 1
    assert P(h, "1 + x").j_adic_order() == 0
    assert h.signature.zero().j_adic_order() == math.inf


def test_m_adic_order():
    h = z22_header()
    # x^2 xi: |mu| = 1 and base order 2, in m^3 but not m^4
    assert P(h, "x^2*xi").m_adic_order() == 3
    assert P(h, "1").m_adic_order() == 0
    assert P(h, "xi*eta").m_adic_order() == 2
    assert h.signature.zero().m_adic_order() == math.inf


# inversion


def test_invert_geometric_series():
    h = z22_header(T=5)
    assert P(h, "1 - th").inverse() == P(h, "1 + th + th^2 + th^3 + th^4 + th^5")


def test_invert_odd_nilpotent():
    h = super_header()
    w = P(h, "2 + xi*eta")
    inv = w.inverse()
    assert inv == P(h, "1/2 - 1/4*xi*eta")
    assert w * inv == 1 and inv * w == 1


def test_invert_base_growth():
    h = z22_header(T=4)
    w = P(h, "1 + x + th*xi")
    assert w * w.inverse() == 1


def test_not_invertible():
    h = z22_header()
    with pytest.raises(NotInvertible):
        P(h, "xi").inverse()
    with pytest.raises(NotInvertible):
        P(h, "x + th^2").inverse()


# approximation and truncation


def test_polynomial_approximation_examples():
    h = z22_header(T=4)
    a = P(h, "x^2*xi")
    assert a.approximation(3) == 0
    b = P(h, "1 + xi")
    assert b.approximation(3) == b
    c = P(h, "(1 + x)*xi")
    approx = c.approximation(2)
    assert approx == P(h, "xi")
    assert (c - approx).m_adic_order() == 2
    with pytest.raises(ValueError):
        c.approximation(5)


def test_truncate_examples():
    h = z22_header(T=4)
    a = P(h, "x + x^2*xi + th^3")
    assert a.truncate(4) == a
    assert P(h, "x^2*xi").truncate(2) == 0
    h1 = z22_header(T=1)
    assert P(h, "1 + xi*eta").truncate(1) == P(h1, "1")
    assert P(h, "1 + xi*eta").truncate(1).signature.T == 1
    with pytest.raises(ValueError):
        a.truncate(5)


# properties


@settings(max_examples=80)
@given(with_signature(2, homogeneous_series))
def test_graded_commutativity(case):
    sig, a, b = case
    sign = commutation_sign(a.degree(), b.degree())
    assert a * b == (b * a).scale(sign)


@settings(max_examples=60)
@given(with_signature(3, T_max=3, q_max=3))
def test_associativity_distributivity(case):
    sig, a, b, c = case
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a + b) * c == a * c + b * c


@given(with_signature(1))
def test_unit_law(case):
    sig, a = case
    assert a * sig.one() == a == sig.one() * a


@settings(max_examples=100)
@given(with_signature(2))
def test_product_matches_oracle(case):
    sig, a, b = case
    assert series_mul(a, b) == naive_product_oracle(a, b)


@settings(max_examples=60)
@given(with_signature(1, T_max=5))
def test_inverse_exact_or_refused(case):
    sig, w = case
    if w.base_projection().constant_term():
        inv = w.inverse()
        assert w * inv == sig.one() and inv * w == sig.one()
    else:
        with pytest.raises(NotInvertible):
            w.inverse()


@settings(max_examples=60)
@given(with_signature(2))
def test_filtrations_superadditive(case):
    sig, a, b = case
    ab = a * b
    assert ab.m_adic_order() >= min(sig.T + 1, a.m_adic_order() + b.m_adic_order())
    assert ab.j_adic_order() >= min(sig.T + 1, a.j_adic_order() + b.j_adic_order())


@settings(max_examples=60)
@given(with_signature(2))
def test_base_projection_is_algebra_morphism(case):
    sig, a, b = case
    assert (a * b).base_projection() == a.base_projection() * b.base_projection()
    assert (a + b).base_projection() == a.base_projection() + b.base_projection()
    assert sig.one().base_projection() == Jet.constant(1, sig.p, sig.T)
    kernel_part = a - sig.from_jet(a.base_projection())
    assert kernel_part.base_projection() == Jet.zero(sig.p, sig.T)
    assert kernel_part.j_adic_order() >= 1


@settings(max_examples=60)
@given(st.data())
def test_truncation_is_a_ring_map(data):
    sig = data.draw(signatures(T_min=1, T_max=5))
    a, b = data.draw(series(sig)), data.draw(series(sig))
    k = data.draw(st.integers(0, sig.T))
    assert (a * b).truncate(k) == a.truncate(k) * b.truncate(k)
    assert (a + b).truncate(k) == a.truncate(k) + b.truncate(k)


def test_m_adic_order_matches_membership_description():
    """m_adic_order(f) >= k+1 iff every coefficient with |mu| <= k vanishes to
    base order k - |mu| + 1."""
    rng = random.Random(11)
    for _ in range(100):
        sig = random_signature(rng, T_max=5)
        f = random_series(rng, sig)
        order = f.m_adic_order()
        for k in range(sig.T + 1):
            member = all(
                j.valuation() >= k - sum(mu) + 1 for mu, j in f.terms.items() if sum(mu) <= k
            )
            assert member == (order >= k + 1)


def test_approximation_corpus():
    rng = random.Random(5)
    for _ in range(100):
        sig = random_signature(rng, T_max=5)
        f = random_series(rng, sig, jet_terms=3)
        for k in range(1, sig.T + 1):
            approx = f.approximation(k)
            assert (f - approx).m_adic_order() >= k
            assert all(j.degree() < k for j in approx.terms.values())
