import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ffql.algebra import (
    ExtensionField,
    FamilySpec,
    Polynomial,
    build_extension,
    check_q,
    divisor_function,
    enumerate_family,
    eta,
    factor,
    family_size,
    field_arith,
    is_irreducible,
    is_squarefree,
    mertens_sums,
    mobius,
    monic_polys,
    poly_arith,
    poly_gcd,
    prime_count,
    quad_char_field,
    zeta_A,
)
from ffql.errors import DomainError


def P(text, q=5):
    return Polynomial.parse(text, q)


def polys(q=5, max_deg=5):
    return st.lists(st.integers(0, q - 1), min_size=0, max_size=max_deg + 1).map(lambda c: Polynomial(c, q))


def nonzero_polys(q=5, max_deg=5):
    return polys(q, max_deg).filter(lambda f: not f.is_zero())


# -- base field -----------------------------------------------------------------


@pytest.mark.parametrize("a,b,q,op,e,want", [
    (2, 0, 5, "inv", None, 3),
    (2, 0, 5, "pow", 4, 1),
    (7, 9, 13, "add", None, 3),
    (3, 4, 5, "mul", None, 2),
    (1, 3, 5, "sub", None, 3),
])
def test_field_arith_examples(a, b, q, op, e, want):
    assert field_arith(a, b, q, op, e) == want


def test_inverse_of_zero_is_rejected():
    with pytest.raises(DomainError):
        field_arith(0, 0, 5, "inv")


@pytest.mark.parametrize("a,want", [(0, 0), (4, 1), (2, -1), (1, 1), (3, -1)])
def test_eta_mod_5(a, want):
    assert eta(a, 5) == want


@pytest.mark.parametrize("q", [3, 5, 13])
def test_eta_is_multiplicative_and_balanced(q):
    vals = [eta(a, q) for a in range(1, q)]
    assert sum(vals) == 0
    for a, b in itertools.product(range(q), repeat=2):
        assert eta(a * b % q, q) == eta(a, q) * eta(b, q)


def test_check_q():
    assert check_q(5) == 5
    assert check_q(3, experimental=True) == 3
    for bad in (3, 7, 9, 2, 1):
        with pytest.raises(DomainError):
            check_q(bad)


# -- extension fields --------------------------------------------------------------


def test_degree_one_extension_is_base_field():
    F = ExtensionField(5, 1)
    assert F.cardinality == 5
    assert F.mul((2,), (3,)) == (1,)


def test_extension_modulus_is_irreducible():
    F = ExtensionField(3, 2)
    quadratics = [f for f in monic_polys(3, 2) if is_irreducible(f)]
    assert len(quadratics) == 3
    assert F.modulus in quadratics


def test_extension_25_field_axioms():
    F = build_extension(5, 2)
    assert F.cardinality == 25
    elems = list(F.elements())
    assert len(elems) == 25
    for a in elems:
        if any(a):
            assert F.mul(a, F.inv(a)) == F.one()
            assert F.pow(a, 24) == F.one()
    squares = {F.mul(a, a) for a in elems if any(a)}
    assert len(squares) == 12
    assert all(F.quad_char(a) == (1 if a in squares else -1) for a in elems if any(a))


def test_quad_char_field_on_base_field_matches_eta():
    for a in range(5):
        assert quad_char_field(a, 5) == eta(a, 5)


def test_explicit_extension_modulus_is_validated():
    with pytest.raises(DomainError):
        ExtensionField(5, 2, P("T^2+4"))  # (T+1)(T+4)


# -- polynomials ----------------------------------------------------------------------


def test_spec_style_examples():
    assert P("T+2") * P("T+3") == P("T^2+1")
    assert poly_gcd(P("T^2+1"), P("T+2")) == P("T+2")
    assert poly_gcd(P("2*T^2+2"), Polynomial([], 5)) == P("T^2+1")
    assert poly_arith(P("T+2"), P("T+3"), "mul") == P("T^2+1")


def test_division_by_zero():
    with pytest.raises(DomainError):
        divmod(P("T"), Polynomial([], 5))


@pytest.mark.parametrize("text", ["0,1,0,1", "T^3+T", "T**3 + T", "t^3+t"])
def test_parse_forms_agree(text):
    assert Polynomial.parse(text, 5).coeffs == (0, 1, 0, 1)


def test_text_round_trip():
    f = P("3*T^4+2*T+1")
    assert Polynomial.parse(f.to_text(), 5) == f
    assert Polynomial.parse(str(f), 5) == f


def test_parse_garbage():
    with pytest.raises(DomainError):
        Polynomial.parse("T^^2", 5)


def test_zero_polynomial():
    z = Polynomial([0, 0], 5)
    assert z.is_zero() and z.degree == -math.inf and z.norm == 0


@settings(max_examples=150, deadline=None)
@given(polys(), polys(), polys())
def test_ring_axioms(f, g, h):
    assert f + g == g + f
    assert f * g == g * f
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert (f - g) + g == f


@settings(max_examples=150, deadline=None)
@given(polys(max_deg=7), nonzero_polys(max_deg=4))
def test_division_algorithm(f, g):
    quo, rem = divmod(f, g)
    assert quo * g + rem == f
    assert rem.is_zero() or rem.degree < g.degree


@settings(max_examples=100, deadline=None)
@given(nonzero_polys(), nonzero_polys())
def test_gcd_divides_both(f, g):
    d = poly_gcd(f, g)
    assert d.is_monic()
    assert (f % d).is_zero() and (g % d).is_zero()


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(0, 4), min_size=1, max_size=6))
def test_factor_reassembles(tail):
    f = Polynomial.monic_from_tail(tail, 5)
    prod = Polynomial.one(5)
    for Q, e in factor(f):
        assert is_irreducible(Q)
        prod = prod * Q**e
    assert prod == f
    assert is_squarefree(f) == all(e == 1 for _, e in factor(f))


def test_squarefree_examples():
    assert not is_squarefree(P("T^2"))
    assert is_squarefree(P("T^2+1"))
    assert is_squarefree(P("T^3+T"))
    with pytest.raises(DomainError):
        is_squarefree(Polynomial([], 5))


def test_irreducible_examples():
    assert all(is_irreducible(f) for f in monic_polys(7, 1))
    assert not is_irreducible(P("T^2+1"))
    assert is_irreducible(Polynomial.parse("T^2+1", 3))
    for bad in (P("2*T+1"), Polynomial.one(5)):
        with pytest.raises(DomainError):
            is_irreducible(bad)


def test_canonical_order():
    got = [f.coeffs for f in monic_polys(3, 2)]
    assert got == [(a, b, 1) for a in range(3) for b in range(3)]
    assert sorted(monic_polys(3, 2), key=lambda f: f) == list(monic_polys(3, 2))


# -- families and counting ----------------------------------------------------------------


def test_enumerate_family_examples():
    assert [f.coeffs for f in enumerate_family(FamilySpec("M", 3, 1, experimental=True))] == [(0, 1), (1, 1), (2, 1)]
    assert sum(1 for _ in enumerate_family(FamilySpec("H", 5, 3))) == 100
    assert sum(1 for _ in enumerate_family(FamilySpec("P", 5, 3))) == 40


def test_family_spec_validation():
    with pytest.raises(DomainError):
        FamilySpec("Q", 5, 3)
    with pytest.raises(DomainError):
        FamilySpec("H", 7, 3)
    spec = FamilySpec.of_genus("H", 5, 2)
    assert (spec.n, spec.g, spec.X, spec.size()) == (5, 2, 3125, 2500)


@pytest.mark.parametrize("q,n,want", [(5, 1, 5), (3, 2, 3), (5, 5, 624), (5, 3, 40), (13, 2, 78)])
def test_prime_count_examples(q, n, want):
    assert prime_count(q, n) == want


@pytest.mark.parametrize("n", range(1, 9))
def test_mobius_sum_identity(n):
    assert sum(mobius(d) for d in range(1, n + 1) if n % d == 0) == (1 if n == 1 else 0)


@pytest.mark.parametrize("kind,q,n", [("H", 3, 4), ("H", 5, 3), ("P", 3, 4), ("M", 3, 3)])
def test_family_size_matches_enumeration(kind, q, n):
    spec = FamilySpec(kind, q, n, experimental=True)
    assert family_size(kind, q, n) == sum(1 for _ in enumerate_family(spec))


@pytest.mark.parametrize("text,k,want", [("T^2", 2, 3), ("T", 3, 3), ("T^3+T", 2, 8), ("1", 4, 1)])
def test_divisor_function(text, k, want):
    assert divisor_function(P(text), k) == want


def test_divisor_function_counts_tuples():
    f = P("T^3+T")
    divs = [g for d in range(4) for g in monic_polys(5, d) if (f % g).is_zero()]
    assert divisor_function(f, 2) == len(divs)
    with pytest.raises(DomainError):
        divisor_function(f, 0)


def test_mertens_examples():
    s_log, s_recip = mertens_sums(5, 5)
    assert s_recip == pytest.approx(1.0)
    s_log, s_recip = mertens_sums(5, 25)
    assert s_recip == pytest.approx(1.4)
    assert s_log == pytest.approx(1.8 * math.log(5))
    with pytest.raises(DomainError):
        mertens_sums(5, 30)


def test_zeta_A_at_two():
    assert zeta_A(2, 5) == pytest.approx(1.25)
