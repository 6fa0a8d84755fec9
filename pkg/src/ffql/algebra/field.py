"""Prime fields F_q and their extensions F_{q^i} = F_q[T]/(m)."""

from __future__ import annotations

import itertools
from functools import cached_property, lru_cache

from ffql.algebra.poly import Polynomial, _mod, _mul, _trim, is_irreducible
from ffql.errors import DomainError


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def check_q(q: int, experimental: bool = False) -> int:
    """Validate the base-field size used by the L-function experiments."""
    if not isinstance(q, int) or not is_prime(q) or q == 2:
        raise DomainError(f"q must be an odd prime, got {q!r}")
    if q % 4 != 1 and not experimental:
        raise DomainError(f"q={q} is not 1 mod 4; pass experimental=True to allow it")
    return q


def field_arith(a: int, b: int, q: int, op: str, e: int | None = None) -> int:
    """Arithmetic in F_q on residues; ``op`` is add, sub, mul, inv or pow (exponent ``e``)."""
    a %= q
    if op == "add":
        return (a + b) % q
    if op == "sub":
        return (a - b) % q
    if op == "mul":
        return a * b % q
    if op == "inv":
        if a == 0:
            raise DomainError("inverse of zero")
        return pow(a, -1, q)
    if op == "pow":
        if e is None:
            raise DomainError("pow needs an exponent")
        if a == 0 and e < 0:
            raise DomainError("negative power of zero")
        return pow(a, e, q)
    raise DomainError(f"unknown field op {op!r}")


def eta(a: int, q: int) -> int:
    """Quadratic character of F_q (Euler's criterion)."""
    a %= q
    if a == 0:
        return 0
    return 1 if pow(a, (q - 1) // 2, q) == 1 else -1


class ExtensionField:
    """F_{q^i} with elements stored as coordinate tuples of length i.

    The modulus is the first monic irreducible of degree i in canonical
    order, so two runs always build the same field.
    """

    def __init__(self, q: int, degree: int, modulus: Polynomial | None = None):
        if degree < 1:
            raise DomainError("extension degree must be >= 1")
        if not is_prime(q):
            raise DomainError(f"q={q} is not prime")
        self.base_prime = q
        self.degree = degree
        if modulus is None:
            modulus = _first_irreducible(q, degree)
        if modulus.degree != degree or not is_irreducible(modulus):
            raise DomainError(f"{modulus} is not a monic irreducible of degree {degree}")
        self.modulus = modulus
        self._m = modulus.coeffs

    @property
    def cardinality(self) -> int:
        return self.base_prime ** self.degree

    def __repr__(self):
        return f"ExtensionField(q={self.base_prime}, degree={self.degree}, modulus={self.modulus})"

    def element(self, x) -> tuple[int, ...]:
        q, i = self.base_prime, self.degree
        if isinstance(x, int):
            coords = [x % q]
        else:
            coords = [int(c) % q for c in x]
        if len(coords) > i:
            coords = _mod(coords, self._m, q)
        return tuple(coords) + (0,) * (i - len(coords))

    def zero(self):
        return (0,) * self.degree

    def one(self):
        return self.element(1)

    def elements(self):
        """All elements, in lexicographic coordinate order."""
        return itertools.product(range(self.base_prime), repeat=self.degree)

    def add(self, a, b):
        q = self.base_prime
        return tuple((x + y) % q for x, y in zip(a, b))

    def sub(self, a, b):
        q = self.base_prime
        return tuple((x - y) % q for x, y in zip(a, b))

    def mul(self, a, b):
        q, i = self.base_prime, self.degree
        if i == 1:
            return (a[0] * b[0] % q,)
        r = _mod(_mul(_trim(list(a)), _trim(list(b)), q), self._m, q)
        return tuple(r) + (0,) * (i - len(r))

    def pow(self, a, e: int):
        if e < 0:
            return self.pow(self.inv(a), -e)
        result, base = self.one(), a
        while e:
            if e & 1:
                result = self.mul(result, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return result

    def inv(self, a):
        if not any(a):
            raise DomainError("inverse of zero")
        return self.pow(a, self.cardinality - 2)

    @cached_property
    def _square_set(self) -> frozenset:
        return frozenset(self.mul(x, x) for x in self.elements() if any(x))

    def quad_char(self, a) -> int:
        """Quadratic character: a^((q^i - 1)/2) as an element of {-1, 0, 1}."""
        if not any(a):
            return 0
        if self.base_prime == 2:
            return 1
        r = self.pow(a, (self.cardinality - 1) // 2)
        if r == self.one():
            return 1
        if r == self.element(-1):
            return -1
        raise AssertionError(f"Euler criterion gave {r} in {self}")

    def quad_char_table(self, a) -> int:
        """Same as quad_char but via a precomputed set of nonzero squares."""
        if not any(a):
            return 0
        return 1 if tuple(a) in self._square_set else -1

    def eval_poly(self, f: Polynomial, x) -> tuple[int, ...]:
        """f(x) for f with F_q coefficients and x in this field (Horner)."""
        acc = self.zero()
        for c in reversed(f.coeffs):
            acc = self.add(self.mul(acc, x), self.element(c))
        return acc


def quad_char_field(a, field: ExtensionField | int) -> int:
    """Quadratic character of ``a`` in F_{q^i}; an int ``field`` means F_q."""
    if isinstance(field, int):
        return eta(a, field)
    return field.quad_char(field.element(a))


@lru_cache(maxsize=None)
def _first_irreducible(q: int, degree: int) -> Polynomial:
    for tail in itertools.product(range(q), repeat=degree):
        f = Polynomial.monic_from_tail(tail, q)
        if is_irreducible(f):
            return f
    raise AssertionError("unreachable: irreducibles exist in every degree")


@lru_cache(maxsize=None)
def build_extension(q: int, i: int) -> ExtensionField:
    return ExtensionField(q, i)
