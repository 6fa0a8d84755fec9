"""Zeta numerators of y^2 = D(x) from point counts over F_{q^i}.

This route never touches a residue symbol over F_q[T]: it counts points on
the curve and turns the counts into L-coefficients with Newton's
identities.  Agreement with :func:`ffql.lfunc.l_coefficients` ties the
character-sum definition to the curve.

Bookkeeping: with L(u) = prod_j (1 - alpha_j u) we have
N_i = q^i + 1 - sum_j alpha_j^i, so the power sums are
s_i = q^i + 1 - N_i and n a_n = -sum_{i=1}^n a_{n-i} s_i.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ffql.algebra.field import ExtensionField, build_extension
from ffql.algebra.poly import Polynomial, is_squarefree
from ffql.errors import DomainError, OracleMismatch
from ffql.lfunc import LPolynomial, l_coefficients


@dataclass(frozen=True)
class PointCounts:
    q: int
    g: int
    counts: tuple[int, ...]

    def hasse_weil_ok(self) -> bool:
        # |N_i - q^i - 1| <= 2g q^(i/2), squared to stay in integers
        return all((N - self.q**i - 1) ** 2 <= 4 * self.g**2 * self.q**i
                   for i, N in enumerate(self.counts, start=1))


def _check_modulus(D: Polynomial) -> int:
    if not D.is_monic() or D.degree % 2 == 0 or not is_squarefree(D):
        raise DomainError(f"{D} must be monic, square-free and of odd degree")
    return (D.degree - 1) // 2


def count_points(D: Polynomial, field: ExtensionField) -> int:
    """Projective points of y^2 = D(x) over ``field`` (one point at infinity)."""
    total = 1
    for x in field.elements():
        total += 1 + field.quad_char_table(field.eval_poly(D, x))
    return total


def point_counts(D: Polynomial, i_max: int | None = None) -> PointCounts:
    g = _check_modulus(D)
    i_max = g if i_max is None else i_max
    counts = tuple(count_points(D, build_extension(D.q, i)) for i in range(1, i_max + 1))
    return PointCounts(D.q, g, counts)


def zeta_numerator(D: Polynomial, counts: PointCounts | None = None) -> LPolynomial:
    g = _check_modulus(D)
    q = D.q
    pc = counts or point_counts(D)
    if len(pc.counts) < g:
        raise DomainError(f"need N_1..N_{g}, got {len(pc.counts)} counts")
    if not pc.hasse_weil_ok():
        raise OracleMismatch(f"point counts {pc.counts} for {D} violate Hasse-Weil")
    s = [None] + [q**i + 1 - N for i, N in enumerate(pc.counts[:g], start=1)]
    a = [1]
    for n in range(1, g + 1):
        total = -sum(a[n - i] * s[i] for i in range(1, n + 1))
        if total % n:
            raise OracleMismatch(f"Newton identity gave non-integer a_{n} for {D}")
        a.append(total // n)
    a += [q ** (n - g) * a[2 * g - n] for n in range(g + 1, 2 * g + 1)]
    return LPolynomial(tuple(a), D, g)


@dataclass(frozen=True)
class CrossCheck:
    modulus: Polynomial
    equal: bool
    diff: list = field(default_factory=list)  # (n, zeta_value, charsum_value)


def compare(Z: LPolynomial, L: LPolynomial) -> CrossCheck:
    n = max(len(Z.coefficients), len(L.coefficients))
    diff = [(i, Z[i], L[i]) for i in range(n) if Z[i] != L[i]]
    return CrossCheck(Z.modulus, not diff, diff)


def cross_check(D: Polynomial, L: LPolynomial | None = None) -> CrossCheck:
    return compare(zeta_numerator(D), L or l_coefficients(D))
