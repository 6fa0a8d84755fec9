"""Truncated-exponential mollifiers built from prime-segment Dirichlet polynomials.

A schedule alpha_0 < alpha_1 < ... < alpha_J cuts the primes into norm
windows X^alpha_{j-1} < |Q| <= X^alpha_j.  Because every prime of a given
degree has the same norm, all segment sums only need the per-degree
character sums c_d(D) = sum_{d(Q)=d} chi_D(Q); those are computed once per
modulus (or once per family, vectorised) and reused.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from ffql import batch
from ffql.algebra.family import FamilySpec
from ffql.algebra.poly import Polynomial
from ffql.charsym import chi_eval
from ffql.errors import DegenerateSchedule, DomainError

E5 = math.exp(5)
DEFAULT_CAP = 64
_WINDOW_TOL = 1e-9


@dataclass(frozen=True)
class MollifierSchedule:
    alphas: tuple[float, ...]
    log_X: float
    mode: str = "desk"
    q: int | None = None
    g: int | None = None
    M: int | None = None
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        if self.mode not in ("asymptotic", "desk"):
            raise DomainError(f"mode must be 'asymptotic' or 'desk', got {self.mode!r}")
        if len(self.alphas) < 1:
            raise DegenerateSchedule("schedule needs at least alpha_0")
        if any(a <= 0 for a in self.alphas):
            raise DomainError("alphas must be positive")
        if any(b <= a for a, b in zip(self.alphas, self.alphas[1:])):
            raise DomainError(f"alphas must be strictly increasing: {self.alphas}")
        if self.cap < 2 or self.cap % 2:
            raise DomainError("truncation cap must be an even integer >= 2")

    @property
    def J(self) -> int:
        return len(self.alphas) - 1

    def y(self, j: int) -> float:
        """e^5 alpha_j^(-3/4), the truncation parameter of segment j."""
        return E5 * self.alphas[j] ** -0.75

    def full_order(self, j: int) -> int:
        return 2 * math.ceil(self.y(j))

    def order(self, j: int) -> int:
        return min(self.full_order(j), self.cap)

    @property
    def capped(self) -> bool:
        """True when some truncation order was cut by the cap (so the run is not faithful to the construction)."""
        return any(self.full_order(j) > self.cap for j in range(1, self.J + 1))

    @property
    def budget(self) -> float:
        return sum(2 * self.alphas[j] * math.ceil(self.y(j)) for j in range(1, self.J + 1))

    @property
    def budget_limit(self) -> float | None:
        return None if self.M is None else 5 * E5 * 10 ** (-self.M / 4)

    @property
    def within_budget(self) -> bool | None:
        lim = self.budget_limit
        return None if lim is None else self.budget <= lim

    @property
    def log_q_X(self) -> float:
        if self.q is None:
            raise DomainError("degree windows need q")
        return self.log_X / math.log(self.q)

    def degree_window(self, j: int) -> range:
        """Prime degrees d with X^alpha_{j-1} < q^d <= X^alpha_j."""
        if not 1 <= j <= self.J:
            raise DomainError(f"segment index {j} outside 1..{self.J}")
        n = self.log_q_X
        lo = math.floor(self.alphas[j - 1] * n + _WINDOW_TOL) + 1
        hi = math.floor(self.alphas[j] * n + _WINDOW_TOL)
        return range(lo, max(lo, hi + 1))

    def degrees(self) -> list[int]:
        return sorted({d for j in range(1, self.J + 1) for d in self.degree_window(j)})

    def describe(self) -> dict:
        return {
            "mode": self.mode,
            "q": self.q,
            "g": self.g,
            "M": self.M,
            "alphas": list(self.alphas),
            "J": self.J,
            "orders": [self.order(j) for j in range(1, self.J + 1)],
            "capped": self.capped,
            "faithful": self.mode == "asymptotic" and not self.capped,
            "windows": {j: list(self.degree_window(j)) for j in range(1, self.J + 1)} if self.q else None,
            "budget": self.budget,
            "budget_limit": self.budget_limit,
        }

    def to_json(self) -> str:
        return json.dumps({"q": self.q, "g": self.g, "M": self.M, "mode": self.mode,
                           "alphas": list(self.alphas), "cap": self.cap}, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "MollifierSchedule":
        d = json.loads(text)
        return schedule(q=d.get("q"), g=d.get("g"), M=d.get("M"), mode=d.get("mode", "desk"),
                        alphas=d.get("alphas"), cap=d.get("cap", DEFAULT_CAP))


def asymptotic_alphas(log_X: float, M: int) -> tuple[float, ...]:
    """alpha_0 = log 2/log X, alpha_j = 20^(j-1)/(log log X)^2, J = 1 + max{j : alpha_j <= 10^-M}."""
    if log_X <= math.e:
        raise DomainError("asymptotic mode needs X > e^e")
    L2 = math.log(log_X) ** 2
    thresh = 10.0 ** (-M)
    top = 0
    j = 1
    while 20 ** (j - 1) / L2 <= thresh:
        top = j
        j += 1
    if top == 0:
        raise DegenerateSchedule(
            f"alpha_1 = {1 / L2:.3g} > 10^-{M}: no j satisfies the threshold at this X")
    J = top + 1
    return (math.log(2) / log_X,) + tuple(20 ** (j - 1) / L2 for j in range(1, J + 1))


def schedule(q: int | None = None, g: int | None = None, M: int | None = None, mode: str = "asymptotic",
             alphas=None, log_X: float | None = None, cap: int = DEFAULT_CAP) -> MollifierSchedule:
    if log_X is None:
        if q is None or g is None:
            raise DomainError("schedule needs (q, g) or log_X")
        log_X = (2 * g + 1) * math.log(q)
    if mode == "asymptotic":
        if M is None:
            raise DomainError("asymptotic mode needs M")
        return MollifierSchedule(asymptotic_alphas(log_X, M), log_X, "asymptotic", q, g, M, cap)
    if alphas is None:
        raise DomainError("desk mode needs an explicit alpha list")
    return MollifierSchedule(tuple(float(a) for a in alphas), log_X, "desk", q, g, M, cap)


def desk_schedule(q: int, g: int, J: int | None = None, cap: int = DEFAULT_CAP) -> MollifierSchedule:
    """One prime degree per segment: alpha_j = (j + 1/2)/(2g+1), j = 1..J (default g+1)."""
    n = 2 * g + 1
    J = g + 1 if J is None else J
    alphas = [math.log(2) / (n * math.log(q))] + [(j + 0.5) / n for j in range(1, J + 1)]
    return schedule(q=q, g=g, mode="desk", alphas=alphas, cap=cap)


# -- scalar evaluation ---------------------------------------------------------


def truncated_exp(y: float, x: float, order: int | None = None) -> float:
    """E_y(x) = sum_{j=0}^{2 ceil(y)} x^j/j!, summed exactly in rationals."""
    return float(truncated_exp_exact(y, x, order))


def truncated_exp_exact(y: float, x: float | Fraction, order: int | None = None) -> Fraction:
    if y < 0:
        raise DomainError("truncation parameter y must be >= 0")
    N = 2 * math.ceil(y) if order is None else order
    x = Fraction(x)
    term, total = Fraction(1), Fraction(1)
    for j in range(1, N + 1):
        term = term * x / j
        total += term
    return total


def prime_degree_sums(D: Polynomial, degrees) -> dict[int, int]:
    """c_d(D) = sum over primes Q of degree d of chi_D(Q)."""
    return {d: sum(chi_eval(D, Q) for Q in batch.primes_of_degree(D.q, d)) for d in degrees}


def _segment_from_sums(sums: Mapping, j: int, s: MollifierSchedule):
    q = s.q
    return sum(sums[d] * q ** (-d / 2) for d in s.degree_window(j))


def _m_from_sums(sums: Mapping, i: int, j: int, s: MollifierSchedule):
    if not 1 <= i <= j <= s.J:
        raise DomainError(f"need 1 <= i <= j <= J, got i={i}, j={j}")
    lq = math.log(s.q)
    top = s.alphas[j] * s.log_X  # log X^alpha_j
    total = 0
    for d in s.degree_window(i):
        w = math.exp(-d * lq * (0.5 + 1 / top)) * (top - d * lq) / top
        total = total + sums[d] * w
    return total


def prime_segment(D: Polynomial, j: int, s: MollifierSchedule, sums: Mapping | None = None) -> float:
    """P_j(D) = sum over primes Q in window j of chi_D(Q)/sqrt|Q|."""
    sums = sums if sums is not None else prime_degree_sums(D, s.degree_window(j))
    return float(_segment_from_sums(sums, j, s))


def segment_m(D: Polynomial, i: int, j: int, s: MollifierSchedule, sums: Mapping | None = None) -> float:
    """M_{i,j}(D): window-i primes weighted by |Q|^(-1/(alpha_j log X)) log(X^alpha_j/|Q|)/log X^alpha_j."""
    if not 1 <= i <= j <= s.J:
        raise DomainError(f"need 1 <= i <= j <= J, got i={i}, j={j}")
    sums = sums if sums is not None else prime_degree_sums(D, s.degree_window(i))
    return float(_m_from_sums(sums, i, j, s))


def mollifier_value(D: Polynomial, alpha: float, s: MollifierSchedule, sums: Mapping | None = None) -> float:
    """M(D, alpha) = prod_j E_{e^5 alpha_j^(-3/4)}(alpha P_j(D))."""
    return float(mollifier_value_exact(D, alpha, s, sums))


def mollifier_value_exact(D: Polynomial, alpha: float, s: MollifierSchedule,
                          sums: Mapping | None = None) -> Fraction:
    sums = sums if sums is not None else prime_degree_sums(D, s.degrees())
    out = Fraction(1)
    for j in range(1, s.J + 1):
        x = alpha * prime_segment(D, j, s, sums)
        out *= truncated_exp_exact(0, x, s.order(j))
    return out


def classify_segments(m: Mapping, s: MollifierSchedule) -> int:
    """j with D in T(j), from the values m[(i, l)] = M_{i,l}(D)."""
    for i in range(1, s.J + 1):
        thr = s.alphas[i] ** -0.75
        if any(abs(m[(i, l)]) > thr for l in range(i, s.J + 1)):
            return i - 1
    return s.J


def classify(D: Polynomial, s: MollifierSchedule, sums: Mapping | None = None) -> int:
    if s.J < 1:
        raise DomainError("classify needs J >= 1")
    sums = sums if sums is not None else prime_degree_sums(D, s.degrees())
    m = {(i, l): _m_from_sums(sums, i, l, s) for i in range(1, s.J + 1) for l in range(i, s.J + 1)}
    return classify_segments(m, s)


# -- family evaluation -----------------------------------------------------------


def family_degree_sums(F: np.ndarray, q: int, degrees) -> dict[int, np.ndarray]:
    out = {}
    for d in degrees:
        acc = np.zeros(F.shape[0], dtype=np.int64)
        for Q in batch.primes_of_degree(q, d):
            acc += batch.chi_column(F, Q)
        out[d] = acc
    return out


def truncated_exp_array(x: np.ndarray, order: int) -> np.ndarray:
    acc = np.ones_like(x, dtype=float)
    for j in range(order, 0, -1):
        acc = 1.0 + acc * x / j
    return acc


def family_segments(sums: Mapping, s: MollifierSchedule, size: int) -> list[np.ndarray]:
    """[P_1(D), ..., P_J(D)] as float arrays over a family of ``size`` members."""
    n = size
    return [np.asarray(_segment_from_sums(sums, j, s), dtype=float) * np.ones(n) for j in range(1, s.J + 1)]


def family_mollifier(segments: list[np.ndarray], alpha: float, s: MollifierSchedule, size: int) -> np.ndarray:
    out = np.ones(size)
    for j, Pj in enumerate(segments, start=1):
        out = out * truncated_exp_array(alpha * Pj, s.order(j))
    return out


def family_classify(sums: Mapping, s: MollifierSchedule, size: int) -> np.ndarray:
    n = size
    cls = np.full(n, s.J, dtype=np.int64)
    undecided = np.ones(n, dtype=bool)
    for i in range(1, s.J + 1):
        thr = s.alphas[i] ** -0.75
        viol = np.zeros(n, dtype=bool)
        for l in range(i, s.J + 1):
            viol |= np.abs(np.asarray(_m_from_sums(sums, i, l, s), dtype=float) * np.ones(n)) > thr
        hit = undecided & viol
        cls[hit] = i - 1
        undecided &= ~viol
    return cls


@dataclass(frozen=True)
class HolderReport:
    form: str
    k: float
    c: float | None
    lhs: float
    rhs: float
    slack: float
    holds: bool
    schedule: dict

    def as_dict(self) -> dict:
        return asdict(self)


def holder_sides(L: np.ndarray, segs: list[np.ndarray], k: float, s: MollifierSchedule,
                 c: float | None = None) -> HolderReport:
    """Both sides of the Hölder bound for sum L M(D, 2k-1) over a family.

    2k > 1: (sum L^2k)^(1/2k) (sum M(D,2k-1)^(2k/(2k-1)))^((2k-1)/2k).
    0 < 2k < 1: three factors with exponents 2k/c, 2/(1-c) and
    p3 = ((1+c)/2 - c/(2k))^-1, using M(D,2k-2) M(D,2-2k) >= 1.  The third
    factor is sum M(D,2k-1)^p3 M(D,2-2k)^((1-c)p3/2); c defaults to
    k/(2-3k), where p3 = 2(2-3k)/(1-2k) and (1-c)p3/2 = 2.
    """
    two_k = 2 * k
    L = np.abs(L)
    fsum = math.fsum
    n = len(L)
    M1 = family_mollifier(segs, two_k - 1, s, n)
    lhs = fsum(L * M1)
    if two_k > 1:
        if c is not None:
            raise DomainError("c is only used when 0 < 2k < 1")
        rhs = fsum(L**two_k) ** (1 / two_k) * fsum(M1 ** (two_k / (two_k - 1))) ** ((two_k - 1) / two_k)
        form = "basicbound1"
    elif 0 < two_k < 1:
        c = k / (2 - 3 * k) if c is None else c
        if not 0 < c < two_k:
            raise DomainError(f"c={c} must lie in (0, 2k)")
        inv_p3 = (1 + c) / 2 - c / two_k
        if not 0 < inv_p3 <= 1:
            raise DomainError(f"third Hölder exponent 1/{inv_p3} is not >= 1")
        p3 = 1 / inv_p3
        M2 = family_mollifier(segs, two_k - 2, s, n)
        M3 = family_mollifier(segs, 2 - two_k, s, n)
        rhs = (fsum(L**two_k) ** (c / two_k)
               * fsum(L**2 * M2) ** ((1 - c) / 2)
               * fsum(M1**p3 * M3 ** ((1 - c) * p3 / 2)) ** inv_p3)
        form = "basicboundksmall"
    else:
        raise DomainError("Hölder chain needs 2k > 1 or 0 < 2k < 1")
    return HolderReport(form, k, c, lhs, rhs, rhs - lhs, lhs <= rhs * (1 + 1e-9), s.describe())


def holder_check(spec: FamilySpec, k: float, s: MollifierSchedule, c: float | None = None,
                 workers: int = 1, cache_dir=None) -> HolderReport:
    from ffql.momentslab import family_data

    fd = family_data(spec, workers, cache_dir)
    segs = family_segments(family_degree_sums(fd.F, spec.q, s.degrees()), s, len(fd.F))
    return holder_sides(fd.values, segs, k, s, c)
