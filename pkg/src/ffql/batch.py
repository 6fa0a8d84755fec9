"""Vectorised residue arithmetic over whole families of moduli.

A family is held as an int64 array of shape (N, n+1): one row per member,
ascending coefficients, rows in canonical order.  Everything here is exact
integer arithmetic, so splitting the rows across worker processes never
changes a result.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache

import numpy as np

from ffql.algebra.family import FamilySpec, monic_polys_upto, prime_count
from ffql.algebra.poly import Polynomial, factor
from ffql.errors import DomainError

log = logging.getLogger(__name__)


def monic_array(q: int, n: int) -> np.ndarray:
    """All monic polynomials of degree n, canonical order, shape (q^n, n+1)."""
    if n == 0:
        return np.ones((1, 1), dtype=np.int64)
    grids = np.indices((q,) * n, dtype=np.int64).reshape(n, -1).T
    return np.hstack([grids, np.ones((grids.shape[0], 1), dtype=np.int64)])


def tail_index(F: np.ndarray, q: int) -> np.ndarray:
    """Canonical index of each monic row (c_0 most significant)."""
    n = F.shape[1] - 1
    w = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return F[:, :n] @ w


def residue_index(R: np.ndarray, q: int) -> np.ndarray:
    """Encode residues of length d as sum r_i q^i."""
    if R.shape[1] == 0:
        return np.zeros(R.shape[0], dtype=np.int64)
    w = q ** np.arange(R.shape[1], dtype=np.int64)
    return R @ w


def all_residues(q: int, d: int) -> np.ndarray:
    """Every residue of length d, ordered so that residue_index is the row number."""
    if d == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.indices((q,) * d, dtype=np.int64).reshape(d, -1)[::-1].T.copy()


def batch_mod(F: np.ndarray, div, q: int) -> np.ndarray:
    """Row-wise remainder of F modulo a monic divisor (tuple of coefficients)."""
    div = np.asarray(div, dtype=np.int64)
    d = len(div) - 1
    if div[-1] != 1:
        raise DomainError("batch_mod needs a monic divisor")
    m = F.shape[1]
    if m <= d:
        out = np.zeros((F.shape[0], d), dtype=np.int64)
        out[:, :m] = F % q
        return out
    R = F % q
    low = div[:d]
    for k in range(m - 1, d - 1, -1):
        c = R[:, k]
        if d:
            R[:, k - d : k] = (R[:, k - d : k] - np.outer(c, low)) % q
    return R[:, :d]


def batch_square(A: np.ndarray, q: int) -> np.ndarray:
    d = A.shape[1]
    out = np.zeros((A.shape[0], max(2 * d - 1, 1)), dtype=np.int64)
    for i in range(d):
        out[:, i : i + d] += A[:, i : i + 1] * A
    return out % q


def batch_mul(A: np.ndarray, B: np.ndarray, q: int) -> np.ndarray:
    """Outer product of two stacks of polynomials: result shape (len A, len B, deg)."""
    da, db = A.shape[1], B.shape[1]
    out = np.zeros((A.shape[0], B.shape[0], da + db - 1), dtype=np.int64)
    for i in range(da):
        out[:, :, i : i + db] += A[:, i, None, None] * B[None, :, :]
    return out % q


# -- families ----------------------------------------------------------------


@lru_cache(maxsize=64)
def _prime_array(q: int, d: int) -> np.ndarray:
    F = monic_array(q, d)
    keep = np.ones(F.shape[0], dtype=bool)
    for e in range(1, d // 2 + 1):
        for P in _prime_array(q, e):
            keep &= batch_mod(F, P, q).any(axis=1)
    out = F[keep]
    if out.shape[0] != prime_count(q, d):
        raise AssertionError(f"sieve found {out.shape[0]} primes of degree {d} over F_{q}")
    out.setflags(write=False)
    return out


def prime_array(q: int, d: int, cache_dir: str | None = None) -> np.ndarray:
    """Monic irreducibles of degree d, canonical order.

    With ``cache_dir`` the table is loaded from (or written to) the on-disk
    prime cache.
    """
    if cache_dir is not None:
        from ffql.cache import cache_primes

        return cache_primes(q, d, cache_dir)
    return _prime_array(q, d)


def primes_upto(q: int, d: int) -> list[Polynomial]:
    return [Polynomial._raw(tuple(int(c) for c in row), q) for e in range(1, d + 1) for row in _prime_array(q, e)]


def primes_of_degree(q: int, d: int) -> list[Polynomial]:
    return [Polynomial._raw(tuple(int(c) for c in row), q) for row in _prime_array(q, d)]


@lru_cache(maxsize=32)
def _squarefree_array(q: int, n: int) -> np.ndarray:
    F = monic_array(q, n)
    keep = np.ones(F.shape[0], dtype=bool)
    for e in range(1, n // 2 + 1):
        for P in _prime_array(q, e):
            P2 = np.convolve(P, P) % q
            keep &= batch_mod(F, P2, q).any(axis=1)
    out = F[keep]
    out.setflags(write=False)
    return out


def family_array(spec: FamilySpec, cache_dir: str | None = None) -> np.ndarray:
    """Members of a family as an (N, n+1) array in canonical order."""
    if spec.kind == "M":
        return monic_array(spec.q, spec.n)
    if spec.kind == "P":
        return prime_array(spec.q, spec.n, cache_dir)
    return _squarefree_array(spec.q, spec.n)


def rows_to_polys(F: np.ndarray, q: int) -> list[Polynomial]:
    return [Polynomial._raw(tuple(int(c) for c in row), q) for row in F]


# -- residue symbols ---------------------------------------------------------


@lru_cache(maxsize=4096)
def _prime_symbol_table(P: tuple, q: int) -> np.ndarray:
    """(r/P) for every residue r mod a prime P, indexed by residue_index."""
    d = len(P) - 1
    R = all_residues(q, d)
    table = -np.ones(q**d, dtype=np.int8)
    sq = batch_mod(batch_square(R[1:], q), P, q)
    table[residue_index(sq, q)] = 1
    table[0] = 0
    table.setflags(write=False)
    return table


@lru_cache(maxsize=4096)
def symbol_table(f: tuple, q: int) -> np.ndarray:
    """(r/f) for every residue r modulo a monic f (Jacobi-style product over f's factors)."""
    d = len(f) - 1
    if d == 0:
        return np.ones(1, dtype=np.int8)
    fp = Polynomial._raw(f, q)
    R = all_residues(q, d)
    table = np.ones(q**d, dtype=np.int8)
    for P, e in factor(fp, lambda k: primes_of_degree(q, k)):
        vals = _prime_symbol_table(P.coeffs, q)[residue_index(batch_mod(R, P.coeffs, q), q)]
        table = table * vals**e
    table.setflags(write=False)
    return table


def chi_column(F: np.ndarray, f: Polynomial) -> np.ndarray:
    """chi_D(f) = (D/f) for every row D of F."""
    if f.degree == 0:
        return np.ones(F.shape[0], dtype=np.int8)
    q = f.q
    return symbol_table(f.coeffs, q)[residue_index(batch_mod(F, f.coeffs, q), q)]


def chi_row(D: Polynomial, n: int) -> np.ndarray:
    """chi_D(f) for every monic f of degree n, canonical order.

    Uses reciprocity (D/f) = (f/D) (-1)^((q-1)/2 d(f) d(D)), i.e. a single
    lookup table modulo D.
    """
    q = D.q
    Fs = monic_array(q, n)
    vals = symbol_table(D.coeffs, q)[residue_index(batch_mod(Fs, D.coeffs, q), q)]
    if ((q - 1) // 2 * n * D.degree) % 2:
        vals = -vals
    return vals


def l_coeff_array(F: np.ndarray, q: int, nmax: int) -> np.ndarray:
    """a_n = sum_{f in M_n} chi_D(f) for n <= nmax, for every row D (transposed sweep)."""
    out = np.zeros((F.shape[0], nmax + 1), dtype=np.int64)
    out[:, 0] = 1
    for f in monic_polys_upto(q, nmax):
        if f.degree == 0:
            continue
        out[:, f.degree] += chi_column(F, f)
    return out


def reflect(low: np.ndarray, q: int, g: int) -> np.ndarray:
    """Complete a_0..a_g to a_0..a_2g with a_(2g-n) = q^(g-n) a_n."""
    out = np.zeros((low.shape[0], 2 * g + 1), dtype=np.int64)
    out[:, : g + 1] = low[:, : g + 1]
    for n in range(g):
        out[:, 2 * g - n] = q ** (g - n) * low[:, n]
    return out


def _l_chunk(args):
    F, q, nmax = args
    return l_coeff_array(F, q, nmax)


def map_rows(func, F: np.ndarray, workers: int, *extra):
    """Apply ``func((chunk, *extra))`` to contiguous row ranges and concatenate."""
    workers = max(1, int(workers))
    if workers == 1 or F.shape[0] < 2 * workers:
        return func((F, *extra))
    chunks = np.array_split(F, workers)
    with ProcessPoolExecutor(max_workers=workers) as ex:
        parts = list(ex.map(func, [(c, *extra) for c in chunks]))
    return np.concatenate(parts, axis=0)


def family_l_array(spec: FamilySpec, workers: int = 1, full: bool = False,
                   cache_dir: str | None = None) -> tuple[np.ndarray, np.ndarray]:
    """(members, L-coefficients) for an odd-degree family.

    By default only a_0..a_g are summed and the rest come from the
    functional-equation reflection; ``full=True`` sums every a_n directly.
    """
    F = family_array(spec, cache_dir)
    g, q = spec.g, spec.q
    if full:
        return F, map_rows(_l_chunk, F, workers, q, 2 * g)
    low = map_rows(_l_chunk, F, workers, q, g)
    return F, reflect(low, q, g)


def central_parts(coeffs: np.ndarray, q: int, g: int) -> tuple[np.ndarray, np.ndarray]:
    """Integer arrays (A, B) with L(1/2) = (A + B sqrt q)/q^g per row."""
    A = np.zeros(coeffs.shape[0], dtype=np.int64)
    B = np.zeros(coeffs.shape[0], dtype=np.int64)
    for n in range(coeffs.shape[1]):
        if n % 2 == 0:
            A += coeffs[:, n] * q ** (g - n // 2)
        else:
            B += coeffs[:, n] * q ** (g - (n + 1) // 2)
    return A, B


def central_floats(A: np.ndarray, B: np.ndarray, q: int, g: int) -> np.ndarray:
    return (A + B * np.sqrt(q)) / float(q**g)


def default_workers() -> int:
    return max(1, min(8, os.cpu_count() or 1))


@lru_cache(maxsize=64)
def divisor_table(q: int, n: int, k: int) -> np.ndarray:
    """d_{k,A}(f) for every monic f of degree n, canonical order.

    Built by Dirichlet convolution d_k = d_{k-1} * 1 over all products g h
    with d(g) + d(h) = n; no factorisation involved.
    """
    if k < 1:
        raise DomainError("divisor function needs k >= 1")
    size = q**n
    if k == 1:
        out = np.ones(size, dtype=np.int64)
    else:
        out = np.zeros(size, dtype=np.int64)
        for a in range(n + 1):
            G, H = monic_array(q, a), monic_array(q, n - a)
            prod = batch_mul(G, H, q).reshape(-1, n + 1)
            w = np.repeat(divisor_table(q, a, k - 1), H.shape[0])
            np.add.at(out, tail_index(prod, q), w)
    out.setflags(write=False)
    return out
