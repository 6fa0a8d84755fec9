import pytest

from ffql.algebra import ExtensionField, Polynomial
from ffql.errors import DomainError, OracleMismatch
from ffql.lfunc import LPolynomial, l_coefficients
from ffql.zetaoracle import PointCounts, compare, count_points, cross_check, point_counts, zeta_numerator

D0 = Polynomial.parse("T^3+T", 5)


def test_point_count_reference():
    assert point_counts(D0).counts == (4,)


def test_hasse_weil_for_cubics():
    for tail in [(1, 2, 3), (0, 4, 0), (2, 2, 2)]:
        D = Polynomial.monic_from_tail(tail, 5)
        try:
            pc = point_counts(D)
        except DomainError:
            continue
        assert abs(pc.counts[0] - 6) ** 2 <= 4 * 5


def test_modulus_independence_degree_one():
    D = Polynomial.parse("T^3+T", 13)
    a = count_points(D, ExtensionField(13, 1))
    b = count_points(D, ExtensionField(13, 1, Polynomial.parse("T+3", 13)))
    assert a == b


def test_modulus_independence_degree_two():
    D = Polynomial.parse("T^5+T+1", 5)
    mods = [Polynomial.parse("T^2+2", 5), Polynomial.parse("T^2+T+2", 5)]
    counts = {count_points(D, ExtensionField(5, 2, m)) for m in mods}
    assert len(counts) == 1


def test_zeta_numerator_reference():
    Z = zeta_numerator(D0)
    assert Z.coefficients == (1, -2, 5)
    assert Z.degree == 2 and Z[2] == 5


def test_cross_check_reference_and_negative_control():
    assert cross_check(D0).equal
    bad = LPolynomial((1, -1, 5), D0, 1)
    res = compare(zeta_numerator(D0), bad)
    assert not res.equal and res.diff == [(1, -2, -1)]


def test_inconsistent_counts_raise():
    with pytest.raises(OracleMismatch):
        zeta_numerator(D0, PointCounts(5, 1, (40,)))


def test_non_squarefree_rejected():
    with pytest.raises(DomainError):
        point_counts(Polynomial.parse("T^3", 5))
    with pytest.raises(DomainError):
        zeta_numerator(Polynomial.parse("T^4+1", 5))


def test_genus_two_matches():
    D = Polynomial.parse("T^5+2*T^2+3", 5)
    Z = zeta_numerator(D)
    assert Z.coefficients == l_coefficients(D).coefficients
    assert Z[4] == 25
