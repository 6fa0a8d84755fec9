import numpy as np
import pytest

from ffql import batch
from ffql.algebra import FamilySpec, Polynomial, divisor_function, enumerate_family, monic_polys, prime_count
from ffql.charsym import chi_eval
from ffql.lfunc import central_value, l_coefficients
from ffql.verify import l_coefficients_match_batch, sample_rows


@pytest.mark.parametrize("kind,q,n", [("H", 5, 3), ("P", 5, 3), ("H", 13, 3), ("P", 5, 4), ("M", 5, 2)])
def test_family_array_matches_scalar_stream(kind, q, n):
    spec = FamilySpec(kind, q, n)
    rows = [Polynomial._raw(tuple(int(c) for c in r), q) for r in batch.family_array(spec)]
    assert rows == list(enumerate_family(spec))


@pytest.mark.parametrize("q,d", [(5, 1), (5, 2), (5, 5), (13, 3)])
def test_prime_array_count(q, d):
    assert batch.prime_array(q, d).shape == (prime_count(q, d), d + 1)


def test_batch_mod_matches_scalar():
    F = batch.monic_array(5, 4)
    div = Polynomial.parse("T^2+T+2", 5)
    R = batch.batch_mod(F, div.coeffs, 5)
    for row, r in zip(F[::37], R[::37]):
        f = Polynomial._raw(tuple(int(c) for c in row), 5)
        want = list((f % div).coeffs) + [0] * 2
        assert list(r) == want[:2]


def test_chi_column_and_row_agree_with_scalar():
    F = batch.family_array(FamilySpec("H", 5, 3))
    f = Polynomial.parse("T^2+3", 5)
    col = batch.chi_column(F, f)
    Ds = batch.rows_to_polys(F, 5)
    assert list(col) == [chi_eval(D, f) for D in Ds]
    D = Ds[17]
    assert list(batch.chi_row(D, 2)) == [chi_eval(D, g) for g in monic_polys(5, 2)]


def test_family_sweep_matches_scalar_l_coefficients():
    spec = FamilySpec.of_genus("H", 5, 2)
    F, coeffs = batch.family_l_array(spec)
    for i in sample_rows(len(F), 25, seed=3):
        D = Polynomial._raw(tuple(int(c) for c in F[i]), 5)
        assert tuple(coeffs[i].tolist()) == l_coefficients(D).coefficients


def test_reflection_equals_direct_sums():
    spec = FamilySpec.of_genus("H", 5, 1)
    _, direct = batch.family_l_array(spec, full=True)
    _, reflected = batch.family_l_array(spec)
    assert np.array_equal(direct, reflected)


def test_central_parts_match_scalar():
    spec = FamilySpec.of_genus("H", 5, 1)
    F, coeffs = batch.family_l_array(spec)
    A, B = batch.central_parts(coeffs, 5, 1)
    for i in range(0, len(F), 9):
        cv = central_value(l_coefficients(Polynomial._raw(tuple(int(c) for c in F[i]), 5)))
        assert (A[i], B[i]) == (cv.A, cv.B)


def test_workers_do_not_change_results():
    spec = FamilySpec.of_genus("P", 5, 2)
    _, one = batch.family_l_array(spec, workers=1)
    _, four = batch.family_l_array(spec, workers=4)
    assert np.array_equal(one, four)


@pytest.mark.parametrize("n,k", [(1, 2), (2, 2), (3, 2), (2, 3), (3, 3)])
def test_divisor_table_matches_factorisation(n, k):
    table = batch.divisor_table(5, n, k)
    assert list(table) == [divisor_function(f, k) for f in monic_polys(5, n)]


def test_single_modulus_sweep():
    assert l_coefficients_match_batch(Polynomial.parse("T^5+2*T+1", 5))


def test_sample_rows_is_seeded_and_sorted():
    a = sample_rows(1000, 50, seed=1)
    assert np.array_equal(a, sample_rows(1000, 50, seed=1))
    assert np.all(np.diff(a) > 0) and len(a) == 50
    assert len(sample_rows(10, None)) == 10
