"""Polynomials over the prime field F_q.

A polynomial is stored as a tuple of integer coefficients in ascending
degree with no trailing zeros; the zero polynomial is the empty tuple.
The low-level helpers prefixed with ``_`` work directly on such tuples (or
lists) and are used by the hot loops elsewhere in the package.
"""

from __future__ import annotations

import math
import re
from typing import Iterable, Sequence

from ffql.errors import DomainError

NEG_INF = -math.inf  # degree of the zero polynomial; never fed to arithmetic


def _trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _add(a: Sequence[int], b: Sequence[int], q: int) -> list[int]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] = (out[i] + x) % q
    return _trim(out)


def _sub(a: Sequence[int], b: Sequence[int], q: int) -> list[int]:
    n = max(len(a), len(b))
    out = [0] * n
    for i, x in enumerate(a):
        out[i] = x
    for i, x in enumerate(b):
        out[i] = (out[i] - x) % q
    return _trim(out)


def _mul(a: Sequence[int], b: Sequence[int], q: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([v % q for v in out])


def _divmod(a: Sequence[int], b: Sequence[int], q: int) -> tuple[list[int], list[int]]:
    if not b:
        raise DomainError("division by the zero polynomial")
    r = list(a)
    db = len(b) - 1
    if len(r) - 1 < db:
        return [], _trim(r)
    inv = pow(b[-1], -1, q)
    quo = [0] * (len(r) - db)
    for k in range(len(r) - 1, db - 1, -1):
        c = r[k] * inv % q
        if c:
            quo[k - db] = c
            for j in range(db + 1):
                r[k - db + j] = (r[k - db + j] - c * b[j]) % q
    return _trim(quo), _trim(r[:db])


def _mod(a: Sequence[int], b: Sequence[int], q: int) -> list[int]:
    """Remainder of a modulo b (b nonzero)."""
    db = len(b) - 1
    if len(a) - 1 < db:
        return _trim(list(a))
    r = list(a)
    lead = b[-1]
    inv = 1 if lead == 1 else pow(lead, -1, q)
    for k in range(len(r) - 1, db - 1, -1):
        c = r[k] * inv % q
        if c:
            base = k - db
            for j in range(db):
                r[base + j] = (r[base + j] - c * b[j]) % q
        r[k] = 0
    return _trim(r[:db])


def _monic(a: Sequence[int], q: int) -> tuple[int, list[int]]:
    """Split a nonzero a into (leading coefficient, monic part)."""
    lead = a[-1]
    if lead == 1:
        return 1, list(a)
    inv = pow(lead, -1, q)
    return lead, [x * inv % q for x in a]


def _gcd(a: Sequence[int], b: Sequence[int], q: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _mod(a, b, q)
    if not a:
        return []
    return _monic(a, q)[1]


def _powmod(base: Sequence[int], e: int, mod: Sequence[int], q: int) -> list[int]:
    result = [1]
    b = _mod(base, mod, q)
    while e:
        if e & 1:
            result = _mod(_mul(result, b, q), mod, q)
        e >>= 1
        if e:
            b = _mod(_mul(b, b, q), mod, q)
    return _mod(result, mod, q) if len(mod) > 1 else []


def _deriv(a: Sequence[int], q: int) -> list[int]:
    return _trim([(i * a[i]) % q for i in range(1, len(a))])


class Polynomial:
    """Element of F_q[T], immutable and hashable.

    >>> f = Polynomial.parse("T^3+T", 5)
    >>> f.coeffs, f.degree, f.norm
    ((0, 1, 0, 1), 3, 125)
    """

    __slots__ = ("coeffs", "q")

    def __init__(self, coeffs: Iterable[int], q: int):
        self.q = q
        self.coeffs = tuple(_trim([int(c) % q for c in coeffs]))

    @classmethod
    def _raw(cls, coeffs: Sequence[int], q: int) -> "Polynomial":
        obj = cls.__new__(cls)
        obj.q = q
        obj.coeffs = tuple(coeffs)
        return obj

    @classmethod
    def one(cls, q: int) -> "Polynomial":
        return cls._raw((1,), q)

    @classmethod
    def T(cls, q: int) -> "Polynomial":
        return cls._raw((0, 1), q)

    @classmethod
    def monic_from_tail(cls, tail: Sequence[int], q: int) -> "Polynomial":
        """Monic polynomial whose non-leading coefficients are ``tail``."""
        return cls._raw(tuple(tail) + (1,), q)

    # -- derived quantities -------------------------------------------------

    @property
    def degree(self):
        """d(f); the zero polynomial has degree -inf."""
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    @property
    def norm(self) -> int:
        """|f| = q^d(f), with |0| = 0."""
        return self.q ** (len(self.coeffs) - 1) if self.coeffs else 0

    @property
    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def monic(self) -> "Polynomial":
        if not self.coeffs:
            raise DomainError("the zero polynomial has no monic normalization")
        return Polynomial._raw(_monic(self.coeffs, self.q)[1], self.q)

    def derivative(self) -> "Polynomial":
        return Polynomial._raw(_deriv(self.coeffs, self.q), self.q)

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.q
        return acc

    # -- ring operations ----------------------------------------------------

    def _other(self, other) -> Sequence[int]:
        if isinstance(other, Polynomial):
            if other.q != self.q:
                raise DomainError(f"mixing F_{self.q} and F_{other.q} polynomials")
            return other.coeffs
        if isinstance(other, int):
            return _trim([other % self.q])
        return NotImplemented

    def __add__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return Polynomial._raw(_add(self.coeffs, b, self.q), self.q)

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return Polynomial._raw(_sub(self.coeffs, b, self.q), self.q)

    def __rsub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return Polynomial._raw(_sub(b, self.coeffs, self.q), self.q)

    def __neg__(self):
        return Polynomial._raw(_sub((), self.coeffs, self.q), self.q)

    def __mul__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return Polynomial._raw(_mul(self.coeffs, b, self.q), self.q)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise DomainError("negative power of a polynomial")
        result, base = [1], list(self.coeffs)
        while e:
            if e & 1:
                result = _mul(result, base, self.q)
            e >>= 1
            if e:
                base = _mul(base, base, self.q)
        return Polynomial._raw(result, self.q)

    def __divmod__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        quo, rem = _divmod(self.coeffs, b, self.q)
        return Polynomial._raw(quo, self.q), Polynomial._raw(rem, self.q)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        if not b:
            raise DomainError("division by the zero polynomial")
        return Polynomial._raw(_mod(self.coeffs, b, self.q), self.q)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.q == other.q and self.coeffs == other.coeffs
        if isinstance(other, int):
            return self.coeffs == tuple(_trim([other % self.q]))
        return NotImplemented

    def __hash__(self):
        return hash((self.q, self.coeffs))

    def __lt__(self, other: "Polynomial"):
        # canonical order: degree first, then the non-leading tail lexicographically
        return (len(self.coeffs), self.coeffs[:-1]) < (len(other.coeffs), other.coeffs[:-1])

    # -- text forms ---------------------------------------------------------

    def to_text(self) -> str:
        """Canonical text form: comma-separated ascending coefficients."""
        return ",".join(str(c) for c in self.coeffs) if self.coeffs else "0"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            mono = "" if i == 0 else ("T" if i == 1 else f"T^{i}")
            if not mono:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            else:
                terms.append(f"{c}*{mono}")
        return "+".join(terms)

    def __repr__(self):
        return f"Polynomial({str(self)!r}, q={self.q})"

    @classmethod
    def parse(cls, text: str, q: int) -> "Polynomial":
        """Read either "0,1,0,1" or a human form such as "T^3+T" / "2*T^2 - 1"."""
        s = text.strip()
        if re.fullmatch(r"\s*-?\d+(\s*,\s*-?\d+)*\s*", s):
            return cls((int(x) for x in s.split(",")), q)
        s = s.replace(" ", "").replace("**", "^")
        if not s:
            raise DomainError(f"cannot parse polynomial {text!r}")
        if s[0] not in "+-":
            s = "+" + s
        coeffs: dict[int, int] = {}
        for sign, body in re.findall(r"([+-])([^+-]+)", s):
            m = re.fullmatch(r"(?:(\d+)\*?)?(?:([TtXx])(?:\^(\d+))?)?", body)
            if not m or (m.group(1) is None and m.group(2) is None):
                raise DomainError(f"cannot parse term {body!r} of {text!r}")
            c = int(m.group(1)) if m.group(1) is not None else 1
            e = 0 if m.group(2) is None else (int(m.group(3)) if m.group(3) else 1)
            coeffs[e] = coeffs.get(e, 0) + (c if sign == "+" else -c)
        dense = [0] * (max(coeffs) + 1)
        for e, c in coeffs.items():
            dense[e] = c
        return cls(dense, q)


def poly_gcd(f: Polynomial, g: Polynomial) -> Polynomial:
    """Monic gcd; gcd(0, 0) is the zero polynomial."""
    if f.q != g.q:
        raise DomainError("mixing fields")
    return Polynomial._raw(_gcd(f.coeffs, g.coeffs, f.q), f.q)


def poly_arith(f: Polynomial, g: Polynomial, op: str):
    if op == "add":
        return f + g
    if op == "mul":
        return f * g
    if op == "divmod":
        return divmod(f, g)
    if op == "gcd":
        return poly_gcd(f, g)
    raise DomainError(f"unknown polynomial op {op!r}")


def is_squarefree(f: Polynomial) -> bool:
    if f.is_zero():
        raise DomainError("is_squarefree of the zero polynomial")
    return len(_gcd(f.coeffs, _deriv(f.coeffs, f.q), f.q)) <= 1


def is_irreducible(f: Polynomial) -> bool:
    """Rabin-style test: f has no factor of degree i for any i <= d(f)/2."""
    if not f.is_monic() or f.is_constant():
        raise DomainError("is_irreducible needs a monic nonconstant polynomial")
    q, a = f.q, f.coeffs
    n = len(a) - 1
    x = [0, 1]
    xp = x
    for _ in range(n // 2):
        xp = _powmod(xp, q, a, q)  # T^(q^i) mod f
        if len(_gcd(a, _sub(xp, x, q), q)) > 1:
            return False
    return True


def factor(f: Polynomial, primes_by_degree=None) -> list[tuple[Polynomial, int]]:
    """Factor a monic f by trial division into (prime, exponent) pairs.

    ``primes_by_degree(d)`` may supply the primes of degree d; by default the
    monic polynomials of each degree are scanned and tested for primality.
    Only meant for desk-scale degrees.
    """
    if not f.is_monic():
        raise DomainError("factor needs a monic polynomial")
    q = f.q
    rest = list(f.coeffs)
    out: list[tuple[Polynomial, int]] = []
    d = 1
    while 2 * d <= len(rest) - 1:
        cands = primes_by_degree(d) if primes_by_degree else _irreducibles_scan(q, d)
        for p in cands:
            pc = p.coeffs
            e = 0
            while len(rest) - 1 >= d:
                quo, rem = _divmod(rest, pc, q)
                if rem:
                    break
                rest, e = quo, e + 1
            if e:
                out.append((p, e))
            if 2 * d > len(rest) - 1:
                break
        d += 1
    if len(rest) > 1:
        out.append((Polynomial._raw(rest, q), 1))
    out.sort(key=lambda pe: (len(pe[0].coeffs), pe[0].coeffs[:-1]))
    # merge a leftover prime that repeats an earlier factor
    merged: list[tuple[Polynomial, int]] = []
    for p, e in out:
        if merged and merged[-1][0] == p:
            merged[-1] = (p, merged[-1][1] + e)
        else:
            merged.append((p, e))
    return merged


def _irreducibles_scan(q: int, d: int) -> list[Polynomial]:
    from ffql.algebra.family import monic_polys  # local import, avoids a cycle

    return [f for f in monic_polys(q, d) if is_irreducible(f)]
