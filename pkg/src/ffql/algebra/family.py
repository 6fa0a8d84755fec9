"""Families of moduli and the counting functions attached to them."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator

from ffql.algebra.field import check_q, is_prime
from ffql.algebra.poly import Polynomial, factor, is_irreducible, is_squarefree
from ffql.errors import DomainError

KINDS = ("H", "P", "M")


@dataclass(frozen=True)
class FamilySpec:
    """kind H: monic square-free of degree n; P: monic irreducible; M: all monic.

    For H and P the degree is n = 2g+1 and X = q^n.
    """

    kind: str
    q: int
    n: int
    experimental: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"family kind must be one of {KINDS}, got {self.kind!r}")
        check_q(self.q, self.experimental)
        if self.n < 0 or (self.kind != "M" and self.n < 1):
            raise DomainError(f"bad degree n={self.n} for family {self.kind}")

    @classmethod
    def of_genus(cls, kind: str, q: int, g: int, experimental: bool = False) -> "FamilySpec":
        return cls(kind, q, 2 * g + 1, experimental)

    @property
    def g(self) -> int:
        if self.n % 2 == 0:
            raise DomainError("genus is only defined for odd degree n = 2g+1")
        return (self.n - 1) // 2

    @property
    def X(self) -> int:
        return self.q ** self.n

    @property
    def log_q_X(self) -> int:
        return self.n

    def size(self) -> int:
        return family_size(self.kind, self.q, self.n)

    def label(self) -> str:
        return f"{self.kind}(q={self.q}, n={self.n})"


def monic_polys(q: int, n: int) -> Iterator[Polynomial]:
    """All monic polynomials of degree n in canonical order.

    Canonical order is lexicographic on the ascending tuple of non-leading
    coefficients (c_0, ..., c_{n-1}), i.e. ``itertools.product`` order.
    """
    for tail in itertools.product(range(q), repeat=n):
        yield Polynomial.monic_from_tail(tail, q)


def monic_polys_upto(q: int, n: int) -> Iterator[Polynomial]:
    for d in range(n + 1):
        yield from monic_polys(q, d)


def enumerate_family(spec: FamilySpec) -> Iterator[Polynomial]:
    """Stream the members of ``spec`` once each, in canonical order."""
    for f in monic_polys(spec.q, spec.n):
        if spec.kind == "M":
            yield f
        elif spec.kind == "H":
            if is_squarefree(f):
                yield f
        elif is_irreducible(f):
            yield f


def mobius(n: int) -> int:
    if n < 1:
        raise DomainError("mobius needs n >= 1")
    result, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    return -result if n > 1 else result


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def prime_count(q: int, n: int) -> int:
    """pi_A(n) = (1/n) sum_{d | n} mu(d) q^(n/d)."""
    if n < 1:
        raise DomainError("prime_count needs n >= 1")
    total = sum(mobius(d) * q ** (n // d) for d in divisors(n))
    count, rem = divmod(total, n)
    assert rem == 0
    return count


def family_size(kind: str, q: int, n: int) -> int:
    if kind == "M":
        return q**n
    if kind == "P":
        return prime_count(q, n)
    if kind == "H":
        return q if n == 1 else q**n - q ** (n - 1)
    raise DomainError(f"unknown family kind {kind!r}")


def divisor_function(f: Polynomial, k: int, factorization=None) -> int:
    """d_{k,A}(f): ordered k-tuples of monic polynomials with product f."""
    if k < 1:
        raise DomainError("divisor function needs k >= 1")
    if not f.is_monic():
        raise DomainError("divisor function needs a monic polynomial")
    if factorization is None:
        factorization = factor(f)
    return math.prod(math.comb(a + k - 1, k - 1) for _, a in factorization)


def mertens_sums(q: int, x: int) -> tuple[float, float]:
    """(sum_{|P|<=x} log|P|/|P|, sum_{|P|<=x} 1/|P|) for x = q^m."""
    m = round(math.log(x, q))
    if m < 1 or q**m != x:
        raise DomainError(f"x={x} is not a positive power of q={q}")
    log_q = math.log(q)
    sum_log = math.fsum(prime_count(q, n) * n * log_q / q**n for n in range(1, m + 1))
    sum_recip = math.fsum(prime_count(q, n) / q**n for n in range(1, m + 1))
    return sum_log, sum_recip


def zeta_A(s: float, q: int) -> float:
    """zeta_A(s) = 1/(1 - q^(1-s))."""
    return 1.0 / (1.0 - q ** (1.0 - s))


def Z(u: complex, q: int) -> complex:
    """zeta_A after u = q^(-s): 1/(1 - q u)."""
    return 1.0 / (1.0 - q * u)


__all__ = [
    "FamilySpec",
    "monic_polys",
    "monic_polys_upto",
    "enumerate_family",
    "prime_count",
    "family_size",
    "divisor_function",
    "mertens_sums",
    "mobius",
    "zeta_A",
    "Z",
    "is_prime",
]
