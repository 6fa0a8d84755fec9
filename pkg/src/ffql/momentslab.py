"""Family moments of central values, twisted moments and their predicted main terms.

Every empirical sum starts from the exact integer pair (A, B) with
L(1/2, chi_D) = (A + B sqrt q)/q^g.  Twisted first and second moments, and
moments of even integer order, are accumulated in Z[sqrt q] and converted to
a float once; other real powers go through the float central value and
``math.fsum``, so the result does not depend on how rows were split across
workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ffql import batch
from ffql.algebra.family import FamilySpec, divisor_function, prime_count, zeta_A
from ffql.algebra.poly import Polynomial, factor
from ffql.errors import DomainError
from ffql.lfunc import theta_bar
from ffql import mollifier as mol


@dataclass(frozen=True)
class FamilyData:
    spec: FamilySpec
    F: np.ndarray
    coeffs: np.ndarray
    A: np.ndarray
    B: np.ndarray

    @property
    def values(self) -> np.ndarray:
        return batch.central_floats(self.A, self.B, self.spec.q, self.spec.g)


_FAMILY_CACHE: dict[FamilySpec, FamilyData] = {}


def family_data(spec: FamilySpec, workers: int = 1, cache_dir=None) -> FamilyData:
    """L-coefficients and exact central parts for a whole family (memoised per process)."""
    if spec.kind == "M":
        raise DomainError("moments are taken over the H or P family")
    fd = _FAMILY_CACHE.get(spec)
    if fd is None:
        F, coeffs = batch.family_l_array(spec, workers=workers, cache_dir=cache_dir)
        A, B = batch.central_parts(coeffs, spec.q, spec.g)
        fd = FamilyData(spec, F, coeffs, A, B)
        _FAMILY_CACHE[spec] = fd
    return fd


def clear_family_cache() -> None:
    _FAMILY_CACHE.clear()


def squarefree_split(l: Polynomial) -> tuple[Polynomial, Polynomial, list]:
    """l = l1 * l2^2 with l1 square-free, plus the factorisation of l."""
    if l.is_zero() or not l.is_monic():
        raise DomainError(f"twist {l} must be monic and nonzero")
    fac = factor(l)
    one = Polynomial.one(l.q)
    l1, l2 = one, one
    for P, e in fac:
        if e % 2:
            l1 = l1 * P
        l2 = l2 * P ** (e // 2)
    return l1, l2, fac


@dataclass(frozen=True)
class MomentReport:
    family: FamilySpec
    k: float
    empirical: float
    main: float
    normalized_error: float
    normalization: str
    l: Polynomial | None = None
    l1: Polynomial | None = None
    l2: Polynomial | None = None
    extra: dict = field(default_factory=dict, compare=False)

    def row(self) -> dict:
        return {
            "family": self.family.kind,
            "q": self.family.q,
            "g": self.family.g,
            "k": self.k,
            "l": self.l.to_text() if self.l is not None else "",
            "empirical": self.empirical,
            "main": self.main,
            "normalized_error": self.normalized_error,
        }

    def as_dict(self) -> dict:
        d = self.row()
        d.update(normalization=self.normalization,
                 l1=self.l1.to_text() if self.l1 is not None else None,
                 l2=self.l2.to_text() if self.l2 is not None else None,
                 size=self.family.size())
        d.update(self.extra)
        return d


def _zsqrt_to_float(U: int, V: int, q: int, denom: int) -> float:
    """(U + V sqrt q)/denom for (possibly huge) integers."""
    # int/int true division rounds correctly however large the operands are
    return U / denom + (V / denom) * math.sqrt(q)


def _zsqrt_pow(A: int, B: int, q: int, k: int) -> tuple[int, int]:
    U, V = 1, 0
    for _ in range(k):
        U, V = U * A + V * B * q, U * B + V * A
    return U, V


def power_sum(fd: FamilyData, k: float, weights: np.ndarray | None = None) -> float:
    """sum_D w(D) |L(1/2, chi_D)|^k; exact in Z[sqrt q] for even integer k."""
    if k < 0:
        raise DomainError(f"moment order must be >= 0, got {k}")
    q, g = fd.spec.q, fd.spec.g
    w = np.ones(len(fd.A), dtype=np.int64) if weights is None else weights
    if float(k).is_integer() and int(k) % 2 == 0:
        kk = int(k)
        SU = SV = 0
        for a, b, c in zip(fd.A.tolist(), fd.B.tolist(), w.tolist()):
            if c:
                U, V = _zsqrt_pow(a, b, q, kk)
                SU += c * U
                SV += c * V
        return _zsqrt_to_float(SU, SV, q, q ** (g * kk))
    return math.fsum((w * np.abs(fd.values) ** k).tolist())


def _family_X(spec: FamilySpec) -> tuple[float, float]:
    return float(spec.X), float(spec.n)


def moment(spec: FamilySpec, k: float, workers: int = 1, cache_dir=None) -> MomentReport:
    if k < 0:
        raise DomainError(f"moment order must be >= 0, got {k}")
    fd = family_data(spec, workers, cache_dir)
    X, lx = _family_X(spec)
    e = k * (k + 1) / 2
    if spec.kind == "H":
        main, norm = X * lx**e, f"X (log_q X)^{e:g}"
    else:
        e -= 1
        main, norm = X * lx**e, f"X (log_q X)^{e:g}"
    emp = power_sum(fd, k)
    return MomentReport(spec, k, emp, main, emp / main, norm)


def _twist_weights(fd: FamilyData, l: Polynomial) -> np.ndarray:
    if l.q != fd.spec.q:
        raise DomainError(f"twist {l} lives over F_{l.q}, family over F_{fd.spec.q}")
    return batch.chi_column(fd.F, l).astype(np.int64)


def twisted_first_moment_P(q: int, g: int, l: Polynomial, workers: int = 1, cache_dir=None) -> MomentReport:
    spec = FamilySpec.of_genus("P", q, g)
    fd = family_data(spec, workers, cache_dir)
    l1, l2, _ = squarefree_split(l)
    w = _twist_weights(fd, l)
    emp = _linear_sum(fd, w)
    X, lx = _family_X(spec)
    n1 = float(l1.norm)
    main = X / (lx * math.sqrt(n1)) * (lx / 2 - l1.degree + 0.5)
    return MomentReport(spec, 1, emp, main, (emp - main) / X**0.75, "X^(3/4)", l, l1, l2)


def _linear_sum(fd: FamilyData, w: np.ndarray) -> float:
    q, g = fd.spec.q, fd.spec.g
    SU = int(np.dot(w, fd.A))
    SV = int(np.dot(w, fd.B))
    return _zsqrt_to_float(SU, SV, q, q**g)


def second_moment_main_P(q: int, g: int, l: Polynomial) -> float:
    spec = FamilySpec.of_genus("P", q, g)
    l1, _, fac = squarefree_split(l)
    X, lx = _family_X(spec)
    primes1 = [P for P, e in fac if e % 2]
    z2 = zeta_A(2, q)
    Lh = 0.5 * (lx - l1.degree)
    C = 1 + 1 / q if l.degree % 2 == 0 else 2.0
    local = math.prod(1 / (1 + 1 / P.norm) for P in primes1)
    extra = math.fsum(P.degree / P.norm / (1 + 1 / P.norm) for P in primes1)
    d1 = divisor_function(l1, 2)
    bracket = Lh**3 / (3 * z2) + C * Lh**2 + extra / z2 * Lh**2
    return X / lx * d1 / math.sqrt(l1.norm) * local * bracket


def twisted_second_moment_P(q: int, g: int, l: Polynomial, workers: int = 1, cache_dir=None) -> MomentReport:
    spec = FamilySpec.of_genus("P", q, g)
    fd = family_data(spec, workers, cache_dir)
    l1, l2, _ = squarefree_split(l)
    emp = power_sum(fd, 2, _twist_weights(fd, l))
    main = second_moment_main_P(q, g, l)
    X, lx = _family_X(spec)
    scale = X / lx * (0.5 * (lx - l1.degree)) ** 1.5
    return MomentReport(spec, 2, emp, main, (emp - main) / scale,
                        "(X/log_q X) (log_q(X/|l1|)/2)^(3/2)", l, l1, l2)


# -- first moment over H ------------------------------------------------------


def _tail_bound(q: int, cutoff: int) -> float:
    # pi(d) <= q^d/d and -log(1-x) <= 2x for x <= 1/2 give sum_{d>D} 2 q^-d/d
    return 2 * q ** -(cutoff + 1) / (cutoff + 1) / (1 - 1 / q)


def euler_C(q: int, tol: float = 1e-7) -> tuple[float, int, float]:
    """C = prod_P (1 - 1/(|P|(|P|+1))), truncated once the tail bound drops below tol."""
    cutoff = 1
    while _tail_bound(q, cutoff) >= tol:
        cutoff += 1
    log_c = math.fsum(prime_count(q, d) * math.log1p(-1 / (q**d * (q**d + 1))) for d in range(1, cutoff + 1))
    return math.exp(log_c), cutoff, _tail_bound(q, cutoff)


def g_local(l: Polynomial) -> float:
    out = 1.0
    for P, _ in (factor(l) if l.degree > 0 else []):
        N = P.norm
        out *= (N + 1) / N * (1 - 1 / (N * (N + 1)))
    return out


def first_moment_main_H(q: int, g: int, l: Polynomial, C1: float = 0.0,
                        C1P: Mapping | None = None) -> float:
    spec = FamilySpec.of_genus("H", q, g)
    l1, _, fac = squarefree_split(l)
    X, lx = _family_X(spec)
    C, _, _ = euler_C(q)
    C1P = C1P or {}
    local = math.fsum(C1P.get(P, 0.0) / P.norm * P.degree for P, _ in fac)
    return C / zeta_A(2, q) * X / (math.sqrt(l1.norm) * g_local(l)) * (lx / 2 - l1.degree + C1 + local)


def twisted_first_moment_H(q: int, g: int, l: Polynomial, C1: float = 0.0, C1P: Mapping | None = None,
                           workers: int = 1, cache_dir=None) -> MomentReport:
    """Twisted first moment over H.  C1 and the per-prime C1P are inputs; C1P defaults to 0."""
    spec = FamilySpec.of_genus("H", q, g)
    fd = family_data(spec, workers, cache_dir)
    l1, l2, _ = squarefree_split(l)
    emp = _linear_sum(fd, _twist_weights(fd, l))
    main = first_moment_main_H(q, g, l, C1, C1P)
    X, _ = _family_X(spec)
    C, cutoff, tail = euler_C(q)
    return MomentReport(spec, 1, emp, main, (emp - main) / (X**0.875 * l.norm**0.25),
                        "X^(7/8) |l|^(1/4)", l, l1, l2,
                        {"C": C, "C_cutoff_degree": cutoff, "C_tail_bound": tail, "C1": C1})


def fit_C1(q: int, g_list: Sequence[int], l: Polynomial, workers: int = 1, cache_dir=None) -> float:
    """Least-squares C1 for the H first moment: main is affine in C1 with slope a_g."""
    num = den = 0.0
    for g in g_list:
        r = twisted_first_moment_H(q, g, l, 0.0, None, workers, cache_dir)
        a = first_moment_main_H(q, g, l, 1.0) - r.main
        num += a * (r.empirical - r.main)
        den += a * a
    return num / den


# -- theta profile --------------------------------------------------------------


@dataclass(frozen=True)
class ThetaProfile:
    q: int
    g: int
    eps: float
    rows: list
    max_ratio: float

    def as_dict(self) -> dict:
        return {"q": self.q, "g": self.g, "eps": self.eps, "rows": self.rows, "max_ratio": self.max_ratio}


def second_moment_theta(q: int, g: int, theta_grid: Sequence[float], eps: float = 0.1,
                        workers: int = 1, cache_dir=None) -> ThetaProfile:
    spec = FamilySpec.of_genus("P", q, g)
    fd = family_data(spec, workers, cache_dir)
    X, lx = _family_X(spec)
    coeffs = fd.coeffs.astype(float)
    rows = []
    for theta in theta_grid:
        u = complex(math.cos(theta), math.sin(theta)) / math.sqrt(q)
        acc = np.zeros(coeffs.shape[0], dtype=complex)
        for n in range(coeffs.shape[1] - 1, -1, -1):
            acc = acc * u + coeffs[:, n]
        emp = math.fsum((acc.real**2 + acc.imag**2).tolist())
        tb = theta_bar(2 * theta)
        width = min(g, 1 / tb) if tb > 0 else g
        bound = X / lx * g ** (1 + eps) * width**2
        rows.append({"theta": theta, "theta_bar_2theta": tb, "empirical": emp, "bound": bound,
                     "ratio": emp / bound})
    return ThetaProfile(q, g, eps, rows, max((r["ratio"] for r in rows), default=math.nan))


# -- order of magnitude -----------------------------------------------------------


def order_of_magnitude_report(q: int, g_list: Sequence[int], k_list: Sequence[float], workers: int = 1,
                              cache_dir=None, drift_factor: float = 3.0) -> list[dict]:
    """empirical/main for both families; each row flags drift from the previous g."""
    rows = []
    for kind in ("H", "P"):
        for k in k_list:
            prev = None
            for g in sorted(g_list):
                r = moment(FamilySpec.of_genus(kind, q, g), k, workers, cache_dir)
                ratio = r.normalized_error
                change = None if prev is None else max(ratio / prev, prev / ratio)
                rows.append({"family": kind, "q": q, "g": g, "k": k, "empirical": r.empirical,
                             "main": r.main, "ratio": ratio, "change": change,
                             "drift": bool(change is not None and change >= drift_factor)})
                prev = ratio
    return rows


# -- mollified sums ---------------------------------------------------------------


@dataclass(frozen=True)
class MollifiedSums:
    S_LM: float
    S_M: float | None
    S_L2M: float
    norms: tuple[float, float, float]
    schedule: dict

    def as_dict(self) -> dict:
        n1, n2, n3 = self.norms
        return {"S_LM": self.S_LM, "S_M": self.S_M, "S_L2M": self.S_L2M,
                "S_LM_normalized": self.S_LM / n1,
                "S_M_normalized": None if self.S_M is None else self.S_M / n2,
                "S_L2M_normalized": self.S_L2M / n3, "schedule": self.schedule}


def mollified_sums(spec: FamilySpec, k: float, s: mol.MollifierSchedule, workers: int = 1,
                   cache_dir=None) -> MollifiedSums:
    """sum L M(D,2k-1), sum M(D,2k-1)^(2k/(2k-1)) and sum L^2 M(D,2k-2) over a family."""
    if s.q is not None and s.q != spec.q:
        raise DomainError(f"schedule is for q={s.q}, family has q={spec.q}")
    fd = family_data(spec, workers, cache_dir)
    n = len(fd.A)
    segs = mol.family_segments(mol.family_degree_sums(fd.F, spec.q, s.degrees()), s, n)
    M1 = mol.family_mollifier(segs, 2 * k - 1, s, n)
    M2 = mol.family_mollifier(segs, 2 * k - 2, s, n)
    L = np.abs(fd.values)
    two_k = 2 * k
    S_LM = math.fsum((L * M1).tolist())
    S_M = None if two_k == 1 else math.fsum((M1 ** (two_k / (two_k - 1))).tolist())
    S_L2M = math.fsum((L**2 * M2).tolist())
    X, lx = _family_X(spec)
    shift = 0 if spec.kind == "H" else 1
    norms = tuple(X * lx ** (e / 2 - shift) for e in (two_k**2 + 1, two_k**2, two_k**2 + 2))
    return MollifiedSums(S_LM, S_M, S_L2M, norms, s.describe())
