"""CLWF: a small binary container for multivector fields and wavelet coefficients.

Layout (little-endian)::

    b"CLWF"  u16 version  u8 kind  u8 n  8-byte blade-order digest
    n x (f64 lower, f64 upper, u32 samples)
    u32 meta length, UTF-8 JSON metadata
    f64 payload, blade-major then row-major grid
    u64 CRC-64/ECMA-182 of everything above

``kind`` is 0 for a spatial field, 1 for a spectral field and 2 for wavelet
coefficients; for coefficients the metadata carries the group grid and the
payload is ``(J, K, 2**n, N_1, ..., N_n)``.
"""

from __future__ import annotations

import json
import os
import struct
import tempfile

import crcmod
import numpy as np

from .clifford_core import get_algebra
from .field import SPATIAL, SPECTRAL, GridSpec, MultivectorField
from .simgroup import GroupGrid, WaveletCoefficients

MAGIC = b"CLWF"
VERSION = 1
KIND_SPATIAL, KIND_SPECTRAL, KIND_COEFFICIENTS = 0, 1, 2

crc64 = crcmod.mkCrcFun(0x142F0E1EBA9EA3693, initCrc=0, rev=False, xorOut=0)


class ClwfError(ValueError):
    pass


def _header(kind: int, grid: GridSpec, meta: dict) -> bytes:
    alg = get_algebra(grid.n)
    parts = [MAGIC, struct.pack("<HBB", VERSION, kind, grid.n), alg.blade_digest]
    for lo, hi, N in zip(grid.lower, grid.upper, grid.shape):
        parts.append(struct.pack("<ddI", lo, hi, N))
    blob = json.dumps(meta, sort_keys=True, separators=(",", ":")).encode()
    parts.append(struct.pack("<I", len(blob)))
    parts.append(blob)
    return b"".join(parts)


def encode(obj, meta: dict | None = None) -> bytes:
    """Serialize a MultivectorField or WaveletCoefficients."""
    meta = dict(meta or {})
    if isinstance(obj, MultivectorField):
        kind = KIND_SPATIAL if obj.domain == SPATIAL else KIND_SPECTRAL
        grid = obj.grid
    elif isinstance(obj, WaveletCoefficients):
        kind = KIND_COEFFICIENTS
        grid = obj.grid.spatial
        meta["group_grid"] = obj.grid.to_dict()
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    body = _header(kind, grid, meta) + np.ascontiguousarray(obj.data, dtype="<f8").tobytes()
    return body + struct.pack("<Q", crc64(body))


def decode(buf: bytes):
    """Inverse of :func:`encode`; returns ``(object, metadata)``."""
    if len(buf) < 24 or buf[:4] != MAGIC:
        raise ClwfError("not a CLWF file")
    body, (crc,) = buf[:-8], struct.unpack("<Q", buf[-8:])
    if crc64(body) != crc:
        raise ClwfError("checksum mismatch")
    version, kind, n = struct.unpack_from("<HBB", body, 4)
    if version != VERSION:
        raise ClwfError(f"unsupported CLWF version {version}")
    if n not in (2, 3):
        raise ClwfError(f"unsupported dimension n={n}")
    alg = get_algebra(n)
    if body[8:16] != alg.blade_digest:
        raise ClwfError("blade ordering differs from this library's")
    off = 16
    lower, upper, shape = [], [], []
    for _ in range(n):
        lo, hi, N = struct.unpack_from("<ddI", body, off)
        off += 20
        lower.append(lo)
        upper.append(hi)
        shape.append(N)
    grid = GridSpec(tuple(lower), tuple(upper), tuple(shape))
    (mlen,) = struct.unpack_from("<I", body, off)
    off += 4
    meta = json.loads(body[off:off + mlen].decode())
    off += mlen
    data = np.frombuffer(body, dtype="<f8", offset=off).astype(float)
    if kind in (KIND_SPATIAL, KIND_SPECTRAL):
        expected = (alg.size,) + grid.shape
        if data.size != int(np.prod(expected)):
            raise ClwfError("payload size does not match the grid")
        domain = SPATIAL if kind == KIND_SPATIAL else SPECTRAL
        return MultivectorField(grid, data.reshape(expected), domain), meta
    if kind == KIND_COEFFICIENTS:
        gg = GroupGrid.from_dict(meta.pop("group_grid"))
        if gg.spatial != grid:
            raise ClwfError("group grid header disagrees with the spatial grid")
        expected = gg.shape + (alg.size,) + grid.shape
        if data.size != int(np.prod(expected)):
            raise ClwfError("payload size does not match the group grid")
        return WaveletCoefficients(gg, data.reshape(expected), copy=False), meta
    raise ClwfError(f"unknown record kind {kind}")


def atomic_write(path: str | os.PathLike, payload: bytes | str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = os.fspath(path)
    if isinstance(payload, str):
        payload = payload.encode()
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=os.path.dirname(os.path.abspath(path)))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save(path, obj, meta: dict | None = None) -> None:
    atomic_write(path, encode(obj, meta))


def load(path):
    with open(path, "rb") as fh:
        return decode(fh.read())
