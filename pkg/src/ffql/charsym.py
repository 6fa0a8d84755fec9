"""Quadratic residue symbols (f/h) in F_q[T] and the characters chi_D."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ffql import batch
from ffql.algebra.family import FamilySpec
from ffql.algebra.field import check_q, eta
from ffql.algebra.poly import Polynomial, _mod, _monic, _powmod, factor
from ffql.errors import DomainError


def residue_symbol(f: Polynomial, h: Polynomial) -> int:
    """(f/h) for monic nonconstant h, by reduction and reciprocity.

    Each step pulls out the leading coefficient c of the reduced top, using
    (c/h) = eta(c)^d(h), then flips with the sign (-1)^((q-1)/2 d(a) d(b)).
    """
    if not h.is_monic() or h.is_constant():
        raise DomainError("residue_symbol needs a monic nonconstant bottom")
    q = h.q
    half = (q - 1) // 2
    a = _mod(f.coeffs, h.coeffs, q)
    b = list(h.coeffs)
    sign = 1
    while True:
        if not a:
            return 0 if len(b) > 1 else sign
        db = len(b) - 1
        c, a = _monic(a, q)
        if c != 1 and db % 2:
            sign *= eta(c, q)
        da = len(a) - 1
        if da == 0:
            return sign
        if (half * da * db) % 2:
            sign = -sign
        a, b = _mod(b, a, q), a


def residue_symbol_euler(f: Polynomial, h: Polynomial) -> int:
    """Oracle for residue_symbol: factor h, Euler's criterion in each residue field."""
    if not h.is_monic() or h.is_constant():
        raise DomainError("residue_symbol needs a monic nonconstant bottom")
    q = h.q
    value = 1
    for P, e in factor(h):
        r = _mod(f.coeffs, P.coeffs, q)
        if not r:
            return 0
        t = _powmod(r, (P.norm - 1) // 2, P.coeffs, q)
        s = 1 if t == [1] else -1
        if s == -1 and t != [q - 1]:
            raise AssertionError(f"Euler criterion gave {t} modulo {P}")
        value *= s**e
    return value


def chi_eval(D: Polynomial, f: Polynomial) -> int:
    """chi_D(f) = (D/f) for monic f; chi_D(1) = 1."""
    if not f.is_monic():
        raise DomainError("chi_D is evaluated on monic polynomials")
    if f.degree == 0:
        return 1
    return residue_symbol(D, f)


def is_square(f: Polynomial) -> bool:
    """Whether a monic f is a perfect square."""
    return all(e % 2 == 0 for _, e in factor(f))


@dataclass(frozen=True)
class CharSum:
    empirical: int
    main: float
    bound_ratio: float


def _charsum_family(q: int, g: int, kind: str) -> FamilySpec:
    check_q(q)  # the main terms assume q = 1 mod 4, so no experimental override here
    return FamilySpec.of_genus(kind, q, g)


def charsum_H(f: Polynomial, q: int, g: int) -> CharSum:
    """sum over D in H_{2g+1,q} of (D/f) against delta_{f=square} X/zeta_A(2) prod_{P|f} |P|/(|P|+1)."""
    if f.is_zero() or not f.is_monic():
        raise DomainError("charsum_H needs a monic nonzero f")
    spec = _charsum_family(q, g, "H")
    F = batch.family_array(spec)
    empirical = int(batch.chi_column(F, f).astype(np.int64).sum())
    X = spec.X
    if is_square(f):
        main = X * (1 - 1 / q) * math.prod(P.norm / (P.norm + 1) for P, _ in factor(f))
    else:
        main = 0.0
    ratio = abs(empirical - main) / (math.sqrt(X) * f.norm**0.25)
    return CharSum(empirical, main, ratio)


def charsum_P(f: Polynomial, q: int, g: int, cache_dir=None) -> CharSum:
    """sum over P in P_{2g+1,q} of (P/f) against delta_{f=square} X/log_q X."""
    if f.is_zero() or not f.is_monic():
        raise DomainError("charsum_P needs a monic nonzero f")
    spec = _charsum_family(q, g, "P")
    F = batch.family_array(spec, cache_dir)
    empirical = int(batch.chi_column(F, f).astype(np.int64).sum())
    X, logX = spec.X, spec.log_q_X
    if is_square(f):
        main = X / logX
        ratio = abs(empirical - main) / (math.sqrt(X) * f.norm**0.25)
    else:
        main = 0.0
        ratio = abs(empirical) / (math.sqrt(X) * f.degree / logX)
    return CharSum(empirical, main, ratio)


def reciprocity_sign(C: Polynomial, D: Polynomial) -> int:
    q = C.q
    return -1 if ((q - 1) // 2 * C.degree * D.degree) % 2 else 1


__all__ = [
    "CharSum",
    "charsum_H",
    "charsum_P",
    "chi_eval",
    "is_square",
    "reciprocity_sign",
    "residue_symbol",
    "residue_symbol_euler",
]
