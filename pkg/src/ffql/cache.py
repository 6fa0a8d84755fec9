"""On-disk tables of monic irreducibles.

File layout, little-endian throughout::

    b"FFQP"  u16 version  u32 q  u32 n  u64 count  count * n bytes

Each record holds the non-leading coefficients c_0..c_{n-1} of one prime,
one byte each, records in canonical order.  Files are written to a temporary
name and renamed into place, and a table is only trusted if its count equals
the Möbius-formula prime count.
"""

from __future__ import annotations

import logging
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from ffql.algebra.family import prime_count
from ffql.errors import ConfigError

log = logging.getLogger(__name__)

MAGIC = b"FFQP"
VERSION = 1
_HEADER = struct.Struct("<4sHIIQ")
ENV_VAR = "FFQL_CACHE_DIR"


def resolve_cache_dir(flag: str | os.PathLike | None) -> Path | None:
    """The flag wins; otherwise FFQL_CACHE_DIR; otherwise no cache."""
    chosen = flag if flag is not None else os.environ.get(ENV_VAR) or None
    return Path(chosen) if chosen is not None else None


def cache_path(directory: str | os.PathLike, q: int, n: int) -> Path:
    return Path(directory) / f"primes_q{q}_n{n}.ffqp"


def encode(q: int, n: int, table: np.ndarray) -> bytes:
    if q >= 256:
        raise ConfigError(f"cache records hold one byte per coefficient; q={q} is too large")
    body = np.ascontiguousarray(table[:, :n], dtype=np.uint8).tobytes()
    return _HEADER.pack(MAGIC, VERSION, q, n, table.shape[0]) + body


def decode(data: bytes, q: int, n: int) -> np.ndarray:
    """Parse a cache file; ValueError on any structural problem."""
    if len(data) < _HEADER.size:
        raise ValueError("file shorter than header")
    magic, version, fq, fn, count = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    if version != VERSION:
        raise ValueError(f"unsupported version {version}")
    if (fq, fn) != (q, n):
        raise ValueError(f"file is for q={fq}, n={fn}")
    if count != prime_count(q, n):
        raise ValueError(f"count {count} != prime count {prime_count(q, n)}")
    body = data[_HEADER.size:]
    if len(body) != count * n:
        raise ValueError(f"body has {len(body)} bytes, expected {count * n}")
    tails = np.frombuffer(body, dtype=np.uint8).reshape(count, n).astype(np.int64)
    if (tails >= q).any():
        raise ValueError("coefficient out of range")
    return np.hstack([tails, np.ones((count, 1), dtype=np.int64)])


def _write_atomic(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=path.name + ".", suffix=".tmp", dir=path.parent)
    try:
        os.chmod(tmp, 0o644)
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def cache_primes(q: int, n: int, directory: str | os.PathLike) -> np.ndarray:
    """Primes of degree n over F_q, loaded from ``directory`` or computed and stored there."""
    from ffql.batch import _prime_array

    path = cache_path(directory, q, n)
    if path.exists():
        try:
            table = decode(path.read_bytes(), q, n)
            table.setflags(write=False)
            return table
        except ValueError as exc:
            log.warning("prime cache %s is corrupt (%s); regenerating", path, exc)
    table = _prime_array(q, n)
    try:
        _write_atomic(path, encode(q, n, table))
    except OSError as exc:
        raise ConfigError(f"cannot write prime cache {path}: {exc}") from exc
    return table


def fill_cache(q: int, n_max: int, directory: str | os.PathLike) -> list[Path]:
    """Write (or validate) one file per degree 1..n_max."""
    out = []
    for n in range(1, n_max + 1):
        cache_primes(q, n, directory)
        out.append(cache_path(directory, q, n))
    return out
