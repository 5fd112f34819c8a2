"""Multivector-valued functions sampled on a periodic box in R^n.

Coefficients are held as a float array shaped ``(2**n, N_1, ..., N_n)``
(blade axis first, then the grid in row-major order). A field lives either
in the spatial domain or, after a Clifford Fourier transform, in the
spectral domain; both share one :class:`GridSpec`, the spectral samples
sitting on the DFT-dual angular frequencies ``2*pi*m/L`` in FFT order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .clifford_core import DimensionMismatch, Multivector, get_algebra

SPATIAL = "spatial"
SPECTRAL = "spectral"


class GridMismatch(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid: ``shape[k]`` samples over ``[lower[k], upper[k])``."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]
    shape: tuple[int, ...]

    def __post_init__(self):
        lower = tuple(float(v) for v in self.lower)
        upper = tuple(float(v) for v in self.upper)
        shape = tuple(int(v) for v in self.shape)
        if not len(lower) == len(upper) == len(shape):
            raise ValueError("lower, upper and shape must have one entry per axis")
        if any(s <= 0 for s in shape):
            raise ValueError(f"sample counts must be positive, got {shape}")
        if any(not u > l for l, u in zip(lower, upper)):
            raise ValueError("each axis needs upper > lower")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "shape", shape)

    @classmethod
    def centered(cls, n: int, samples: int | Sequence[int], extent: float | Sequence[float]) -> "GridSpec":
        """Box ``[-extent/2, extent/2)`` per axis."""
        samples = (samples,) * n if np.isscalar(samples) else tuple(samples)
        extent = (extent,) * n if np.isscalar(extent) else tuple(extent)
        return cls(tuple(-e / 2 for e in extent), tuple(e / 2 for e in extent), samples)

    @property
    def n(self) -> int:
        return len(self.shape)

    @property
    def lengths(self) -> np.ndarray:
        return np.subtract(self.upper, self.lower)

    @property
    def spacing(self) -> np.ndarray:
        return self.lengths / np.array(self.shape)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def frequency_cell_volume(self) -> float:
        return float(np.prod(2 * np.pi / self.lengths))

    @property
    def volume(self) -> float:
        return float(np.prod(self.lengths))

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def axes(self) -> list[np.ndarray]:
        return [lo + d * np.arange(N) for lo, d, N in zip(self.lower, self.spacing, self.shape)]

    def points(self) -> np.ndarray:
        """Sample coordinates, shape ``(n, N_1, ..., N_n)``."""
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"))

    def frequency_axes(self) -> list[np.ndarray]:
        return [2 * np.pi * np.fft.fftfreq(N, d) for N, d in zip(self.shape, self.spacing)]

    def frequencies(self) -> np.ndarray:
        """Angular frequencies in FFT order, shape ``(n, N_1, ..., N_n)``."""
        return np.stack(np.meshgrid(*self.frequency_axes(), indexing="ij"))

    def offsets(self) -> np.ndarray:
        """Lattice displacements ``k * spacing`` with k wrapped into ``[-N/2, N/2)``, FFT order."""
        axes = [d * np.fft.fftfreq(N, 1.0 / N) for N, d in zip(self.shape, self.spacing)]
        return np.stack(np.meshgrid(*axes, indexing="ij"))

    def wrap(self, displacement: np.ndarray) -> np.ndarray:
        """Minimal-image representative of displacements (axis 0 indexes dimension)."""
        L = self.lengths.reshape((-1,) + (1,) * (displacement.ndim - 1))
        return displacement - L * np.floor(displacement / L + 0.5)

    def index_of(self, point: Sequence[float], tol: float = 1e-9) -> tuple[int, ...]:
        """Grid index of a point lying on the (periodic) lattice."""
        idx = []
        for x, lo, d, N in zip(point, self.lower, self.spacing, self.shape):
            k = (x - lo) / d
            kr = round(k)
            if abs(k - kr) > tol:
                raise GridMismatch(f"{x} is not a grid coordinate")
            idx.append(int(kr) % N)
        return tuple(idx)

    def to_dict(self) -> dict:
        return {"lower": list(self.lower), "upper": list(self.upper), "shape": list(self.shape)}

    @classmethod
    def from_dict(cls, d: dict) -> "GridSpec":
        return cls(tuple(d["lower"]), tuple(d["upper"]), tuple(d["shape"]))


class MultivectorField:
    """Sampled ``f: R^n -> Cl(n,0)``; immutable."""

    __slots__ = ("alg", "grid", "data", "domain")

    def __init__(self, grid: GridSpec, data: np.ndarray, domain: str = SPATIAL):
        alg = get_algebra(grid.n)
        arr = np.array(data, dtype=float)
        if arr.shape != (alg.size,) + grid.shape:
            raise DimensionMismatch(f"field data shape {arr.shape} does not match {(alg.size,) + grid.shape}")
        if domain not in (SPATIAL, SPECTRAL):
            raise ValueError(f"unknown domain {domain!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "alg", alg)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "domain", domain)

    def __setattr__(self, key, value):
        raise AttributeError("MultivectorField is immutable")

    # -- construction -------------------------------------------------------
    @classmethod
    def zeros(cls, grid: GridSpec, domain: str = SPATIAL) -> "MultivectorField":
        return cls(grid, np.zeros((1 << grid.n,) + grid.shape), domain)

    @classmethod
    def from_function(cls, grid: GridSpec, fn: Callable[[np.ndarray], np.ndarray]) -> "MultivectorField":
        """``fn`` maps points ``(n, ...)`` to coefficients ``(2**n, ...)``."""
        return cls(grid, fn(grid.points()))

    @classmethod
    def constant(cls, grid: GridSpec, value: Multivector) -> "MultivectorField":
        data = np.broadcast_to(value.coeffs.reshape((-1,) + (1,) * grid.n), (value.alg.size,) + grid.shape)
        return cls(grid, data)

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def measure(self) -> float:
        """Quadrature weight of one sample in this field's domain."""
        return self.grid.cell_volume if self.domain == SPATIAL else self.grid.frequency_cell_volume

    def at(self, index: Sequence[int]) -> Multivector:
        return Multivector(self.alg, self.data[(slice(None),) + tuple(index)])

    def _like(self, data: np.ndarray) -> "MultivectorField":
        return MultivectorField(self.grid, data, self.domain)

    def _check(self, other: "MultivectorField") -> None:
        if not isinstance(other, MultivectorField):
            raise TypeError("expected a MultivectorField")
        if other.grid != self.grid:
            raise GridMismatch(f"{self.grid} vs {other.grid}")
        if other.domain != self.domain:
            raise GridMismatch(f"{self.domain} field combined with {other.domain} field")

    # -- field algebra ------------------------------------------------------
    def __add__(self, other: "MultivectorField") -> "MultivectorField":
        self._check(other)
        return self._like(self.data + other.data)

    def __sub__(self, other: "MultivectorField") -> "MultivectorField":
        self._check(other)
        return self._like(self.data - other.data)

    def __neg__(self) -> "MultivectorField":
        return self._like(-self.data)

    def __mul__(self, other) -> "MultivectorField":
        if np.isscalar(other):
            return self._like(self.data * float(other))
        if isinstance(other, Multivector):
            return self.scale_right(other)
        if isinstance(other, MultivectorField):
            self._check(other)
            return self._like(self.alg.product_arrays(self.data, other.data))
        return NotImplemented

    def __rmul__(self, other) -> "MultivectorField":
        if np.isscalar(other):
            return self._like(self.data * float(other))
        if isinstance(other, Multivector):
            return self.scale_left(other)
        return NotImplemented

    def scale_left(self, m: Multivector) -> "MultivectorField":
        """Pointwise ``m * f(x)``."""
        return self._like(np.tensordot(self.alg.left_matrix(m.coeffs), self.data, axes=1))

    def scale_right(self, m: Multivector) -> "MultivectorField":
        """Pointwise ``f(x) * m``."""
        return self._like(np.tensordot(self.alg.right_matrix(m.coeffs), self.data, axes=1))

    def map_coeffs(self, fn: Callable[[np.ndarray], np.ndarray]) -> "MultivectorField":
        return self._like(fn(self.data))

    def reverse(self) -> "MultivectorField":
        return self._like(self.alg.reverse_arrays(self.data))

    def grade(self, k: int) -> "MultivectorField":
        mask = (self.alg.grades == k).reshape((-1,) + (1,) * self.n)
        return self._like(np.where(mask, self.data, 0.0))

    def parity_split(self) -> tuple["MultivectorField", "MultivectorField"]:
        mask = self.alg.even_mask.reshape((-1,) + (1,) * self.n)
        even = np.where(mask, self.data, 0.0)
        return self._like(even), self._like(self.data - even)

    def parity(self, tol: float = 0.0) -> int | None:
        """+1 if purely even-graded, -1 if purely odd-graded, else None."""
        even, odd = self.parity_split()
        e = np.abs(even.data).max(initial=0.0)
        o = np.abs(odd.data).max(initial=0.0)
        scale = max(e, o)
        if o <= tol * scale:
            return 1
        if e <= tol * scale:
            return -1
        return None

    def roll(self, shift: Sequence[int]) -> "MultivectorField":
        """Circular shift by whole samples: result(x) = f(x - shift*spacing)."""
        return self._like(np.roll(self.data, tuple(shift), axis=tuple(range(1, self.n + 1))))

    def modulus(self) -> np.ndarray:
        return np.sqrt(np.sum(self.data**2, axis=0))

    def component_integrals(self) -> np.ndarray:
        """Integral of each blade component, shape ``(2**n,)``."""
        return self.data.reshape(self.alg.size, -1).sum(axis=1) * self.measure

    def allclose(self, other: "MultivectorField", atol: float = 1e-12) -> bool:
        self._check(other)
        return bool(np.allclose(self.data, other.data, atol=atol, rtol=0.0))

    def __repr__(self) -> str:
        return f"MultivectorField(n={self.n}, shape={self.grid.shape}, domain={self.domain})"


def inner_product(f: MultivectorField, g: MultivectorField) -> Multivector:
    """(f, g) = sum over samples of f(x) g(x)~ times the cell measure."""
    f._check(g)
    alg = f.alg
    prod = alg.product_arrays(f.data, alg.reverse_arrays(g.data))
    return Multivector(alg, prod.reshape(alg.size, -1).sum(axis=1) * f.measure)


def norm(f: MultivectorField) -> float:
    return math.sqrt(float(np.sum(f.data**2)) * f.measure)



def serialize(f: MultivectorField) -> bytes:
    """CLWF bytes of a field; see :mod:`clifford_cwt.clwf`."""
    from . import clwf  # clwf builds on this module

    return clwf.encode(f)


def deserialize(buf: bytes) -> MultivectorField:
    from . import clwf

    obj, _ = clwf.decode(buf)
    if not isinstance(obj, MultivectorField):
        raise clwf.ClwfError("record holds wavelet coefficients, not a field")
    return obj
