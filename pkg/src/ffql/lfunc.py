"""L-polynomials L(u, chi_D), exact central values and related bounds."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import zip_longest
from typing import Callable, Sequence

import numpy as np

from ffql import batch
from ffql.algebra.family import monic_polys
from ffql.algebra.poly import Polynomial, is_squarefree
from ffql.charsym import chi_eval
from ffql.errors import DomainError, RootFindingError


@dataclass(frozen=True)
class LPolynomial:
    """Integer coefficients a_0..a_deg of L(u, chi_D) = sum_f chi_D(f) u^d(f)."""

    coefficients: tuple[int, ...]
    modulus: Polynomial | None = None
    g: int | None = None
    primitive: bool = True

    @property
    def degree(self) -> int:
        c = self.coefficients
        n = len(c) - 1
        while n > 0 and c[n] == 0:
            n -= 1
        return n

    def __getitem__(self, n: int) -> int:
        return self.coefficients[n] if n < len(self.coefficients) else 0

    def reflection_holds(self) -> bool:
        """a_(2g-n) = q^(g-n) a_n for 0 <= n <= g."""
        if self.g is None or self.modulus is None:
            raise DomainError("reflection needs an odd-degree modulus")
        q, g = self.modulus.q, self.g
        return all(self[2 * g - n] == q ** (g - n) * self[n] for n in range(g + 1))


@dataclass(frozen=True)
class CentralValue:
    """L(1/2, chi_D) = (A + B sqrt(q)) / q^g held exactly."""

    A: int
    B: int
    g: int
    q: int
    value: float = field(compare=False)

    def is_nonnegative(self) -> bool:
        """Exact sign of A + B sqrt(q), integers only."""
        A, B, q = self.A, self.B, self.q
        if A >= 0 and B >= 0:
            return True
        if A < 0 and B < 0:
            return False
        if A >= 0:
            return A * A >= q * B * B
        return q * B * B >= A * A

    def is_zero(self) -> bool:
        return self.A == 0 and self.B == 0

    def as_dict(self) -> dict:
        return {"A": self.A, "B": self.B, "g": self.g, "float": self.value}


def l_coefficients(D: Polynomial, strict: bool = True) -> LPolynomial:
    """Sum chi_D over each M_n, one symbol at a time (the per-D oracle path)."""
    if not D.is_monic() or D.is_constant():
        raise DomainError("l_coefficients needs a monic nonconstant modulus")
    sqf = is_squarefree(D)
    if strict and not sqf:
        raise DomainError(f"{D} is not square-free")
    q, n = D.q, D.degree
    coeffs = [1]
    for m in range(1, n):
        coeffs.append(sum(chi_eval(D, f) for f in monic_polys(q, m)))
    g = (n - 1) // 2 if n % 2 else None
    return LPolynomial(tuple(coeffs), D, g, primitive=sqf)


def central_value(L: LPolynomial) -> CentralValue:
    if L.g is None or L.modulus is None:
        raise DomainError("central value needs an odd-degree square-free modulus")
    q, g = L.modulus.q, L.g
    A = sum(L[n] * q ** (g - n // 2) for n in range(0, 2 * g + 1, 2))
    B = sum(L[n] * q ** (g - (n + 1) // 2) for n in range(1, 2 * g + 1, 2))
    return CentralValue(A, B, g, q, (A + B * math.sqrt(q)) / q**g)


def l_eval(L: LPolynomial | Sequence[int], u: complex) -> complex:
    coeffs = L.coefficients if isinstance(L, LPolynomial) else L
    acc = 0j
    for c in reversed(coeffs):
        acc = acc * u + c
    return acc


def afe_eval(D: Polynomial, u: complex, k: int, L: LPolynomial | None = None) -> tuple[complex, complex]:
    """Both sides of the exact approximate functional equation for L(u/sqrt q)^k.

    The right side sums d_{k,A}(f) chi_D(f) over monic f of degree <= kg and
    <= kg-1, with the divisor function built by Dirichlet convolution.
    """
    if k < 1:
        raise DomainError("afe needs k >= 1")
    if abs(abs(u) - 1) > 1e-12:
        raise DomainError("afe is stated for |u| = 1")
    L = L or l_coefficients(D)
    q, g = D.q, L.g
    lhs = l_eval(L, u / math.sqrt(q)) ** k
    c = []
    for n in range(k * g + 1):
        c.append(int(np.dot(batch.divisor_table(q, n, k), batch.chi_row(D, n).astype(np.int64))))
    first = sum(c[n] * u**n / q ** (n / 2) for n in range(k * g + 1))
    second = sum(c[n] * u ** (-n) / q ** (n / 2) for n in range(k * g))
    return lhs, first + u ** (2 * k * g) * second


@dataclass(frozen=True)
class Root:
    root: complex
    rh_residual: float


def _qtrim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def _qdivmod(a: list, b: list) -> tuple[list, list]:
    a = list(a)
    out = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        c = a[-1] / b[-1]
        shift = len(a) - len(b)
        out[shift] = c
        for i, bc in enumerate(b):
            a[shift + i] -= c * bc
        a.pop()
        _qtrim(a)
    return _qtrim(out), a


def _qgcd(a: list, b: list) -> list:
    while b:
        a, b = b, _qdivmod(a, b)[1]
    return [c / a[-1] for c in a]


def _qderiv(a: list) -> list:
    return _qtrim([n * a[n] for n in range(1, len(a))])


def squarefree_factors(coeffs) -> list[tuple[list, int]]:
    """Yun's algorithm over Q: [(factor, multiplicity)], ascending coefficients."""
    f = _qtrim([Fraction(c) for c in coeffs])
    if len(f) <= 1:
        return []
    out = []
    a = _qgcd(f, _qderiv(f))
    b = _qdivmod(f, a)[0]
    c = _qdivmod(_qderiv(f), a)[0]
    d = _qtrim([x - y for x, y in zip_longest(c, _qderiv(b), fillvalue=Fraction(0))])
    m = 1
    while len(b) > 1:
        a = _qgcd(b, d) if d else b
        if len(a) > 1:
            out.append((a, m))
        b = _qdivmod(b, a)[0]
        c = _qdivmod(d, a)[0]
        d = _qtrim([x - y for x, y in zip_longest(c, _qderiv(b), fillvalue=Fraction(0))])
        m += 1
    return out


def _simple_roots(coeffs: np.ndarray, tol: float, modulus) -> list[complex]:
    deg = len(coeffs) - 1
    raw = np.roots(coeffs[::-1])
    dcoeffs = [n * coeffs[n] for n in range(1, deg + 1)]
    out = []
    for z in raw:
        z = complex(z)
        dz = l_eval(dcoeffs, z)
        if dz != 0:
            z = z - l_eval(coeffs, z) / dz
        scale = sum(abs(c) * abs(z) ** n for n, c in enumerate(coeffs))
        if abs(l_eval(coeffs, z)) > tol * scale:
            raise RootFindingError(f"root {z} of L for {modulus} has backward error above {tol}")
        out.append(z)
    return out


def zeros(L: LPolynomial, tol: float = 1e-10) -> list[Root]:
    """Roots of L(u), with multiplicity.

    L is first split exactly into square-free factors over Q, so repeated
    roots (common when the Jacobian splits) are found to full precision;
    each factor's roots come from companion-matrix eigenvalues plus one
    Newton step, and a backward-error check guards the result.
    """
    if L.degree < 1:
        return []
    q = L.modulus.q if L.modulus is not None else None
    out = []
    for fac, mult in squarefree_factors(L.coefficients[: L.degree + 1]):
        for z in _simple_roots(np.array([float(c) for c in fac]), tol, L.modulus):
            resid = abs(abs(z) - q ** -0.5) if q else math.nan
            out.extend([Root(z, resid)] * mult)
    return out


def theta_bar(theta: float) -> float:
    theta %= 2 * math.pi
    return min(theta, 2 * math.pi - theta)


def log_l_upper_bound(D: Polynomial, h: int, z: complex | None = None,
                      general: bool = False, chi: Callable | None = None) -> float:
    """Explicit right side of the short-prime-sum upper bound for log|L(1/2+z, chi_D)|.

    Default: sum_{|P|<=x} chi_D(P)|P|^(-1/2-1/log x) log(x/|P|)/log x
    + (1/2) log log x + log X/log x with x = q^h (the O(1) is not included).
    ``general=True`` gives m/h + (1/h) Re sum_{j d(P) <= h} chi_D(P)^j
    (h - j d(P))/j |P|^(-j(1/2 + z + 1/(h log q))) with m = 2g, an exact
    inequality for Re z >= 0.
    """
    q, n = D.q, D.degree
    if n % 2 == 0:
        raise DomainError("log_l_upper_bound needs an odd-degree modulus")
    g = (n - 1) // 2
    if not 1 <= h <= 2 * g:
        raise DomainError(f"h={h} outside 1..2g={2 * g}")
    chi = chi or (lambda P: chi_eval(D, P))
    lq = math.log(q)
    if not general:
        logx = h * lq
        s = 0.0
        for d in range(1, h + 1):
            w = q ** (-d * (0.5 + 1 / logx)) * (h - d) / h
            s += w * sum(chi(P) for P in batch.primes_of_degree(q, d))
        return s + 0.5 * math.log(logx) + n * lq / logx
    z = 0 if z is None else z
    if complex(z).real < 0:
        raise DomainError("general form needs Re z >= 0")
    total = 0j
    for d in range(1, h + 1):
        vals = [chi(P) for P in batch.primes_of_degree(q, d)]
        for j in range(1, h // d + 1):
            cj = sum(v**j for v in vals)
            if cj:
                total += cj * (h - j * d) / j * cmath.exp(-j * d * lq * (0.5 + z + 1 / (h * lq)))
    return 2 * g / h + total.real / h


def log_central(D: Polynomial, z: complex = 0, L: LPolynomial | None = None) -> float:
    """log|L(1/2+z, chi_D)| (-inf at a zero)."""
    L = L or l_coefficients(D)
    v = abs(l_eval(L, D.q ** -(0.5 + z)))
    return math.log(v) if v > 0 else -math.inf


def perron_check(a, N: int, r: float, nodes: int = 512, max_terms: int = 5000) -> tuple[float, float]:
    """Partial sum sum_{n<=N} a(n) directly and via the contour integral on |u| = r.

    ``a`` is a callable n -> a(n) or a finite sequence.  The contour integral
    of (sum a(n) u^n) / ((1-u) u^(N+1)) is evaluated with the trapezoid rule.
    """
    if not 0 < r < 1:
        raise DomainError("radius must satisfy 0 < r < 1")
    if N < 0:
        raise DomainError("N must be >= 0")
    if callable(a):
        coeffs = []
        peak, quiet = 0.0, 0
        for n in range(max_terms):
            c = float(a(n))
            coeffs.append(c)
            t = abs(c) * r**n
            peak = max(peak, t)
            quiet = quiet + 1 if t <= 1e-18 * (1 + peak) else 0
            if n > N and quiet >= 10:
                break
        else:
            raise DomainError(f"series does not converge on |u| = {r} (terms not decaying)")
    else:
        coeffs = [float(c) for c in a]
    direct = math.fsum(coeffs[: N + 1])
    c = np.array(coeffs)
    k = np.arange(nodes)
    u = r * np.exp(2j * np.pi * k / nodes)
    series = np.polynomial.polynomial.polyval(u, c)
    integrand = series / ((1 - u) * u ** (N + 1)) * u
    contour = float(np.mean(integrand).real)
    return direct, contour
