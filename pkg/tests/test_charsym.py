import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ffql.algebra import Polynomial, monic_polys, monic_polys_upto, poly_gcd
from ffql.charsym import (
    charsum_H,
    charsum_P,
    chi_eval,
    is_square,
    reciprocity_sign,
    residue_symbol,
    residue_symbol_euler,
)
from ffql.errors import DomainError


def P(text, q=5):
    return Polynomial.parse(text, q)


def monic(q, max_deg):
    return st.integers(1, max_deg).flatmap(
        lambda d: st.lists(st.integers(0, q - 1), min_size=d, max_size=d)
    ).map(lambda tail: Polynomial.monic_from_tail(tail, q))


def any_poly(q, max_deg):
    return st.lists(st.integers(0, q - 1), max_size=max_deg + 1).map(lambda c: Polynomial(c, q))


def test_symbol_examples():
    assert residue_symbol(P("T"), P("T+1")) == 1
    assert residue_symbol(P("T+2"), P("T")) == -1
    assert residue_symbol(P("T^2+T"), P("T")) == 0


def test_bad_bottom():
    with pytest.raises(DomainError):
        residue_symbol(P("T"), P("2*T+1"))
    with pytest.raises(DomainError):
        residue_symbol(P("T"), Polynomial.one(5))


def test_chi_examples():
    D = P("T^3+T")
    assert chi_eval(D, Polynomial.one(5)) == 1
    assert chi_eval(D, P("T-1")) == -1
    with pytest.raises(DomainError):
        chi_eval(D, P("2*T"))


@pytest.mark.parametrize("q", [5, 13, 3])
@settings(max_examples=120, deadline=None)
@given(data=st.data())
def test_fast_symbol_matches_euler(q, data):
    f = data.draw(any_poly(q, 6))
    h = data.draw(monic(q, 4))
    assert residue_symbol(f, h) == residue_symbol_euler(f, h)


@settings(max_examples=120, deadline=None)
@given(monic(5, 4), monic(5, 4))
def test_reciprocity(C, D):
    if poly_gcd(C, D).degree > 0:
        assert residue_symbol(C, D) == 0
    else:
        assert residue_symbol(C, D) * residue_symbol(D, C) == reciprocity_sign(C, D)


@settings(max_examples=120, deadline=None)
@given(monic(5, 5), monic(5, 3), monic(5, 3))
def test_chi_multiplicative(D, f, g):
    assert chi_eval(D, f * g) == chi_eval(D, f) * chi_eval(D, g)


def test_symbol_periodic_in_top():
    h = P("T^2+2")
    for f in monic_polys_upto(5, 2):
        assert residue_symbol(f, h) == residue_symbol(f + h * P("T+3"), h)


def test_is_square():
    assert is_square(P("T^2"))
    assert is_square(Polynomial.one(5))
    assert not is_square(P("T^3+T"))


def test_charsum_examples():
    h = charsum_H(P("T^2"), 5, 1)
    assert h.empirical == 84
    assert h.main == pytest.approx(250 / 3)
    p = charsum_P(P("T^2"), 5, 1)
    assert p.empirical == 40
    assert p.main == pytest.approx(125 / 3)
    one = Polynomial.one(5)
    assert charsum_H(one, 5, 1).empirical == 100
    assert charsum_H(one, 5, 1).main == pytest.approx(100)
    assert charsum_P(one, 5, 1).empirical == 40


def test_charsum_refuses_q_3_mod_4():
    with pytest.raises(DomainError):
        charsum_H(Polynomial.one(3), 3, 1)


def test_nonsquare_charsums_small():
    for f in monic_polys_upto(5, 2):
        if f.degree > 0 and not is_square(f):
            assert charsum_H(f, 5, 1).bound_ratio <= 5
            assert charsum_P(f, 5, 1).bound_ratio <= 5


def test_symbol_table_matches_scalar_on_cubics():
    D = P("T^3+T")
    for f in monic_polys(5, 3):
        assert chi_eval(D, f) == residue_symbol_euler(D, f)
