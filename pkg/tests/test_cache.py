import logging

import numpy as np
import pytest

from ffql import batch
from ffql.cache import MAGIC, cache_path, cache_primes, decode, encode, fill_cache, resolve_cache_dir


def test_round_trip_and_layout(tmp_path):
    table = cache_primes(5, 3, tmp_path)
    assert table.shape == (40, 4)
    path = cache_path(tmp_path, 5, 3)
    data = path.read_bytes()
    assert data[:4] == MAGIC
    assert int.from_bytes(data[4:6], "little") == 1
    assert int.from_bytes(data[6:10], "little") == 5
    assert int.from_bytes(data[10:14], "little") == 3
    assert int.from_bytes(data[14:22], "little") == 40
    assert len(data) == 22 + 40 * 3
    again = cache_primes(5, 3, tmp_path)
    assert np.array_equal(again, table)
    assert np.array_equal(again, batch.prime_array(5, 3))


def test_reload_reads_file(tmp_path, monkeypatch):
    cache_primes(5, 2, tmp_path)

    def boom(*a):
        raise AssertionError("recomputed instead of loading")

    monkeypatch.setattr(batch, "_prime_array", boom)
    assert cache_primes(5, 2, tmp_path).shape == (10, 3)


@pytest.mark.parametrize("damage", [
    lambda b: b[:-1],
    lambda b: b"XXXX" + b[4:],
    lambda b: b[:14] + (41).to_bytes(8, "little") + b[22:],
    lambda b: b"",
])
def test_corrupt_file_regenerates(tmp_path, caplog, damage):
    good = cache_primes(5, 3, tmp_path)
    path = cache_path(tmp_path, 5, 3)
    path.write_bytes(damage(path.read_bytes()))
    with caplog.at_level(logging.WARNING):
        table = cache_primes(5, 3, tmp_path)
    assert np.array_equal(table, good)
    assert "corrupt" in caplog.text
    assert decode(path.read_bytes(), 5, 3).shape == (40, 4)


def test_wrong_parameters_rejected():
    blob = encode(5, 2, batch.prime_array(5, 2))
    with pytest.raises(ValueError):
        decode(blob, 5, 3)


def test_fill_cache(tmp_path):
    paths = fill_cache(13, 2, tmp_path)
    assert [p.name for p in paths] == ["primes_q13_n1.ffqp", "primes_q13_n2.ffqp"]
    assert not list(tmp_path.glob("*.tmp"))


def test_cache_dir_resolution(monkeypatch, tmp_path):
    monkeypatch.delenv("FFQL_CACHE_DIR", raising=False)
    assert resolve_cache_dir(None) is None
    monkeypatch.setenv("FFQL_CACHE_DIR", str(tmp_path / "env"))
    assert resolve_cache_dir(None) == tmp_path / "env"
    assert resolve_cache_dir(tmp_path / "flag") == tmp_path / "flag"
