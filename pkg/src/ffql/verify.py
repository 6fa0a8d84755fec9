"""Family-wide consistency checks: Weil bound, exact signs, oracle agreement, AFE, reciprocity.

Each check returns a plain dict with an ``ok`` flag and enough detail to
name the first offending modulus.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from ffql import batch
from ffql.algebra.family import FamilySpec
from ffql.algebra.poly import Polynomial, poly_gcd
from ffql.charsym import reciprocity_sign, residue_symbol, residue_symbol_euler
from ffql.lfunc import LPolynomial, afe_eval, l_coefficients, zeros
from ffql.zetaoracle import cross_check

RH_TOL = 1e-8
AFE_TOL = 1e-9


def sample_rows(n: int, samples: int | None, seed: int = 0) -> np.ndarray:
    """Sorted row indices: all rows, or ``samples`` distinct ones from a seeded generator."""
    if samples is None or samples >= n:
        return np.arange(n)
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(n, size=samples, replace=False))


def _lpoly(row, coeffs, q, g) -> LPolynomial:
    D = Polynomial._raw(tuple(int(c) for c in row), q)
    return LPolynomial(tuple(int(c) for c in coeffs), D, g)


def check_rh(spec: FamilySpec, workers: int = 1, cache_dir=None, tol: float = RH_TOL) -> dict:
    F, coeffs = batch.family_l_array(spec, workers, cache_dir=cache_dir)
    q, g = spec.q, spec.g
    worst, worst_D = 0.0, None
    for row, c in zip(F, coeffs):
        L = _lpoly(row, c, q, g)
        r = max((z.rh_residual for z in zeros(L)), default=0.0)
        if r > worst:
            worst, worst_D = r, L.modulus
    return {"check": "rh", "family": spec.label(), "members": len(F), "max_residual": worst,
            "worst_modulus": worst_D.to_text() if worst_D is not None else None, "ok": worst < tol}


def exact_nonnegative(A: int, B: int, q: int) -> bool:
    if A >= 0 and B >= 0:
        return True
    if A < 0 and B < 0:
        return False
    return A * A >= q * B * B if A >= 0 else q * B * B >= A * A


def check_nonneg(spec: FamilySpec, workers: int = 1, cache_dir=None) -> dict:
    F, coeffs = batch.family_l_array(spec, workers, cache_dir=cache_dir)
    A, B = batch.central_parts(coeffs, spec.q, spec.g)
    bad = [i for i, (a, b) in enumerate(zip(A.tolist(), B.tolist())) if not exact_nonnegative(a, b, spec.q)]
    zero = int(np.count_nonzero((A == 0) & (B == 0)))
    first = Polynomial._raw(tuple(int(c) for c in F[bad[0]]), spec.q).to_text() if bad else None
    return {"check": "nonneg", "family": spec.label(), "members": len(F), "negative": len(bad),
            "zero_values": zero, "first_negative": first, "ok": not bad}


def check_oracle(spec: FamilySpec, samples: int | None = None, seed: int = 0, cache_dir=None) -> dict:
    F = batch.family_array(spec, cache_dir)
    idx = sample_rows(len(F), samples, seed)
    mismatches = []
    for i in idx:
        D = Polynomial._raw(tuple(int(c) for c in F[i]), spec.q)
        res = cross_check(D)
        if not res.equal:
            mismatches.append({"modulus": D.to_text(), "diff": res.diff})
    return {"check": "oracle", "family": spec.label(), "checked": len(idx), "mismatches": mismatches,
            "ok": not mismatches}


def check_afe(spec: FamilySpec, samples: int = 20, ks=(1, 2, 3), n_roots: int = 8, seed: int = 0,
              workers: int = 1, cache_dir=None, tol: float = AFE_TOL) -> dict:
    F, coeffs = batch.family_l_array(spec, workers, full=True, cache_dir=cache_dir)
    q, g = spec.q, spec.g
    refl = batch.reflect(coeffs, q, g)
    bad_reflection = np.flatnonzero((refl != coeffs).any(axis=1))
    worst, failures, cases = 0.0, [], 0
    for i in sample_rows(len(F), samples, seed):
        L = _lpoly(F[i], coeffs[i], q, g)
        for k in ks:
            for m in range(n_roots):
                u = cmath.exp(2j * math.pi * m / n_roots)
                lhs, rhs = afe_eval(L.modulus, u, k, L)
                err = abs(lhs - rhs) / (1 + abs(lhs))
                worst = max(worst, err)
                cases += 1
                if err > tol:
                    failures.append({"modulus": L.modulus.to_text(), "k": k, "root": m, "error": err})
    return {"check": "afe", "family": spec.label(), "cases": cases, "max_scaled_error": worst,
            "failures": failures, "reflection_members": len(F),
            "reflection_failures": [Polynomial._raw(tuple(int(c) for c in F[i]), q).to_text()
                                    for i in bad_reflection[:10]],
            "ok": not failures and not len(bad_reflection)}


def check_reciprocity(q: int, max_degree: int = 3, samples: int = 500, seed: int = 0) -> dict:
    """(C/D)(D/C) = (-1)^((q-1)/2 d(C) d(D)) on coprime monic pairs, and fast vs Euler symbols agree."""
    rng = np.random.default_rng(seed)
    failures, checked = [], 0
    for _ in range(samples):
        dc, dd = (int(x) for x in rng.integers(1, max_degree + 1, size=2))
        C = Polynomial.monic_from_tail(tuple(int(x) for x in rng.integers(0, q, size=dc)), q)
        D = Polynomial.monic_from_tail(tuple(int(x) for x in rng.integers(0, q, size=dd)), q)
        if poly_gcd(C, D).degree > 0:
            continue
        checked += 1
        fast = residue_symbol(C, D), residue_symbol(D, C)
        slow = residue_symbol_euler(C, D), residue_symbol_euler(D, C)
        if fast != slow or fast[0] * fast[1] != reciprocity_sign(C, D):
            failures.append({"C": C.to_text(), "D": D.to_text(), "fast": fast, "euler": slow})
    return {"check": "reciprocity", "q": q, "pairs": checked, "failures": failures, "ok": not failures}


def l_coefficients_match_batch(D: Polynomial) -> bool:
    """Scalar per-D sums equal the vectorised family sweep on one modulus."""
    F = np.array([D.coeffs], dtype=np.int64)
    return tuple(batch.l_coeff_array(F, D.q, D.degree - 1)[0].tolist()) == l_coefficients(D).coefficients


__all__ = ["check_afe", "check_nonneg", "check_oracle", "check_reciprocity", "check_rh",
           "exact_nonnegative", "l_coefficients_match_batch", "sample_rows"]
