import struct

import numpy as np
import pytest

from clifford_cwt import clwf
from clifford_cwt.field import SPECTRAL, GridSpec, MultivectorField
from clifford_cwt.simgroup import WaveletCoefficients, build_group_grid


def test_crc64_check_value():
    # catalogued check value of CRC-64/ECMA-182
    assert clwf.crc64(b"123456789") == 0x6C40DF5F0B497347


@pytest.mark.parametrize("n,domain", [(2, "spatial"), (3, "spatial"), (2, SPECTRAL)])
def test_field_roundtrip(tmp_path, n, domain):
    grid = GridSpec((-1.0,) * n, (2.5,) * n, (4,) * n)
    f = MultivectorField(grid, np.random.default_rng(n).standard_normal((1 << n,) + grid.shape), domain)
    path = tmp_path / "f.clwf"
    clwf.save(path, f, {"note": "x"})
    g, meta = clwf.load(path)
    assert g.grid == grid and g.domain == domain
    assert np.array_equal(g.data, f.data)
    assert meta == {"note": "x"}


def test_coefficients_roundtrip(tmp_path):
    spatial = GridSpec.centered(3, 4, 2.0)
    grid = build_group_grid((0.5, 2.0, 2), 3, spatial)
    W = WaveletCoefficients(grid, np.random.default_rng(0).standard_normal(grid.shape + (8,) + spatial.shape))
    clwf.save(tmp_path / "w.clwf", W)
    V, meta = clwf.load(tmp_path / "w.clwf")
    assert V.grid == grid and np.array_equal(V.data, W.data) and meta == {}


def test_encoding_is_deterministic():
    grid = GridSpec.centered(2, 4, 1.0)
    f = MultivectorField(grid, np.arange(64.0).reshape(4, 4, 4))
    assert clwf.encode(f, {"b": 1, "a": 2}) == clwf.encode(f, {"a": 2, "b": 1})


def test_corruption_is_detected():
    grid = GridSpec.centered(2, 4, 1.0)
    buf = bytearray(clwf.encode(MultivectorField(grid, np.ones((4, 4, 4)))))
    buf[-20] ^= 0x01
    with pytest.raises(clwf.ClwfError, match="checksum"):
        clwf.decode(bytes(buf))
    with pytest.raises(clwf.ClwfError):
        clwf.decode(b"NOPE" + bytes(40))


def test_foreign_blade_order_rejected():
    grid = GridSpec.centered(2, 2, 1.0)
    buf = bytearray(clwf.encode(MultivectorField(grid, np.ones((4, 2, 2))))[:-8])
    buf[8:16] = bytes(8)
    body = bytes(buf)
    with pytest.raises(clwf.ClwfError, match="blade"):
        clwf.decode(body + struct.pack("<Q", clwf.crc64(body)))


def test_atomic_write_leaves_no_temporaries(tmp_path):
    target = tmp_path / "out.txt"
    clwf.atomic_write(target, "hello")
    clwf.atomic_write(target, "again")
    assert target.read_text() == "again"
    assert [p.name for p in tmp_path.iterdir()] == ["out.txt"]


def test_field_serialize_helpers_and_version():
    from clifford_cwt.field import deserialize, serialize

    grid = GridSpec.centered(2, 4, 1.0)
    f = MultivectorField(grid, np.random.default_rng(1).standard_normal((4, 4, 4)))
    buf = serialize(f)
    assert np.array_equal(deserialize(buf).data, f.data)
    body = bytearray(buf[:-8])
    body[4:6] = struct.pack("<H", 99)
    body = bytes(body)
    with pytest.raises(clwf.ClwfError, match="version"):
        clwf.decode(body + struct.pack("<Q", clwf.crc64(body)))
