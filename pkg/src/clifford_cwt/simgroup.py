"""The similitude group SIM(n) = R+ x SO(n) x| R^n and its Haar quadrature.

Rotation parameters are an angle for n=2 and a unit quaternion
``(w, x, y, z)`` for n=3. The left Haar measure is
``da dtheta d^n b / a^(n+1)``; the SO(n) part is normalized to total mass 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .clifford_core import Multivector, get_algebra
from .field import GridMismatch, GridSpec

RotationParam = Union[float, tuple]

# Constant of the super-Fibonacci spiral: the real root of x^4 = x + 4.
_SUPERFIB_PSI = 1.533751168755204288118041


def normalize_rotation(theta: RotationParam, n: int) -> RotationParam:
    if n == 2:
        return float(theta) % (2 * math.pi)
    q = np.asarray(theta, dtype=float)
    if q.shape != (4,):
        raise ValueError("n=3 rotations are unit quaternions (w, x, y, z)")
    q = q / np.linalg.norm(q)
    if q[0] < 0:
        q = -q
    return tuple(float(v) for v in q)


def rotation_matrix(theta: RotationParam, n: int) -> np.ndarray:
    if n == 2:
        c, s = math.cos(theta), math.sin(theta)
        return np.array([[c, -s], [s, c]])
    w, x, y, z = np.asarray(theta, dtype=float) / np.linalg.norm(theta)
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def axis_angle(axis: Sequence[float], angle: float) -> tuple:
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    h = angle / 2
    return normalize_rotation((math.cos(h), *(math.sin(h) * axis)), 3)


def compose_rotations(first: RotationParam, second: RotationParam, n: int) -> RotationParam:
    """Parameter of ``r_first @ r_second``."""
    if n == 2:
        return normalize_rotation(first + second, 2)
    w1, x1, y1, z1 = first
    w2, x2, y2, z2 = second
    q = (
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    )
    return normalize_rotation(q, 3)


def invert_rotation(theta: RotationParam, n: int) -> RotationParam:
    if n == 2:
        return normalize_rotation(-theta, 2)
    w, x, y, z = theta
    return normalize_rotation((w, -x, -y, -z), 3)


def identity_rotation(n: int) -> RotationParam:
    return 0.0 if n == 2 else (1.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class GroupPoint:
    """One element (a, r_theta, b) of SIM(n)."""

    a: float
    theta: RotationParam
    b: tuple

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"dilation must be positive, got {self.a}")
        b = tuple(float(v) for v in np.atleast_1d(self.b))
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "theta", normalize_rotation(self.theta, len(b)))

    @classmethod
    def identity(cls, n: int) -> "GroupPoint":
        return cls(1.0, identity_rotation(n), (0.0,) * n)

    @property
    def n(self) -> int:
        return len(self.b)

    @property
    def matrix(self) -> np.ndarray:
        return rotation_matrix(self.theta, self.n)

    def apply(self, x: np.ndarray) -> np.ndarray:
        """a r_theta(x) + b for points with the coordinate axis first."""
        x = np.asarray(x, dtype=float)
        b = np.array(self.b).reshape((-1,) + (1,) * (x.ndim - 1))
        return self.a * np.tensordot(self.matrix, x, axes=1) + b

    def inverse_apply(self, x: np.ndarray) -> np.ndarray:
        """r_theta^{-1}((x - b) / a)."""
        x = np.asarray(x, dtype=float)
        b = np.array(self.b).reshape((-1,) + (1,) * (x.ndim - 1))
        return np.tensordot(self.matrix.T, (x - b) / self.a, axes=1)

    def compose(self, other: "GroupPoint") -> "GroupPoint":
        """Group product: ``self.compose(other).apply(x) == self.apply(other.apply(x))``."""
        b = self.a * self.matrix @ np.array(other.b) + np.array(self.b)
        return GroupPoint(self.a * other.a, compose_rotations(self.theta, other.theta, self.n), tuple(b))

    def inverse(self) -> "GroupPoint":
        rinv = invert_rotation(self.theta, self.n)
        b = -rotation_matrix(rinv, self.n) @ np.array(self.b) / self.a
        return GroupPoint(1.0 / self.a, rinv, tuple(b))


def so2_uniform(count: int) -> list[float]:
    return [2 * math.pi * k / count for k in range(count)]


def so3_superfibonacci(count: int) -> list[tuple]:
    """Deterministic quasi-uniform unit quaternions (super-Fibonacci spiral)."""
    out = []
    for i in range(count):
        s = i + 0.5
        r = math.sqrt(s / count)
        R = math.sqrt(1.0 - s / count)
        alpha = 2 * math.pi * s / math.sqrt(2.0)
        beta = 2 * math.pi * s / _SUPERFIB_PSI
        out.append(normalize_rotation((r * math.sin(alpha), r * math.cos(alpha), R * math.sin(beta), R * math.cos(beta)), 3))
    return out


def so3_octahedral() -> list[tuple]:
    """The 24 rotations mapping the coordinate axes onto themselves."""
    mats = []
    for perm in ([0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]):
        for signs in np.ndindex(2, 2, 2):
            m = np.zeros((3, 3))
            for row, (col, sg) in enumerate(zip(perm, signs)):
                m[row, col] = -1.0 if sg else 1.0
            if np.linalg.det(m) > 0:
                mats.append(m)
    return [matrix_to_quaternion(m) for m in mats]


def matrix_to_quaternion(m: np.ndarray) -> tuple:
    m = np.asarray(m, dtype=float)
    tr = np.trace(m)
    if tr > 0:
        s = 2 * math.sqrt(tr + 1)
        q = (s / 4, (m[2, 1] - m[1, 2]) / s, (m[0, 2] - m[2, 0]) / s, (m[1, 0] - m[0, 1]) / s)
    else:
        i = int(np.argmax(np.diag(m)))
        j, k = (i + 1) % 3, (i + 2) % 3
        s = 2 * math.sqrt(1 + m[i, i] - m[j, j] - m[k, k])
        v = [0.0, 0.0, 0.0]
        v[i] = s / 4
        v[j] = (m[j, i] + m[i, j]) / s
        v[k] = (m[k, i] + m[i, k]) / s
        q = ((m[k, j] - m[j, k]) / s, *v)
    return normalize_rotation(q, 3)


@dataclass(frozen=True)
class GroupGrid:
    """Quadrature nodes for SIM(n): scales x rotations x the spatial grid.

    ``scale_weights`` discretize ``da / a^(n+1)`` and ``rotation_weights``
    the normalized Haar measure on SO(n); every translation node carries the
    spatial cell volume.
    """

    scales: tuple
    scale_weights: tuple
    rotations: tuple
    rotation_weights: tuple
    spatial: GridSpec
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        n = self.spatial.n
        object.__setattr__(self, "scales", tuple(float(a) for a in self.scales))
        object.__setattr__(self, "scale_weights", tuple(float(w) for w in self.scale_weights))
        object.__setattr__(self, "rotations", tuple(normalize_rotation(r, n) for r in self.rotations))
        object.__setattr__(self, "rotation_weights", tuple(float(w) for w in self.rotation_weights))
        if len(self.scales) != len(self.scale_weights) or len(self.rotations) != len(self.rotation_weights):
            raise ValueError("one weight per node required")
        if not self.scales or not self.rotations:
            raise ValueError("group grid needs at least one scale and one rotation")
        if min(self.scales) <= 0:
            raise ValueError("scales must be positive")
        if min(self.scale_weights + self.rotation_weights) <= 0:
            raise ValueError("quadrature weights must be positive")

    @property
    def n(self) -> int:
        return self.spatial.n

    @property
    def shape(self) -> tuple:
        return (len(self.scales), len(self.rotations))

    def measure_weights(self) -> np.ndarray:
        """Weights of d mu over the (scale, rotation) nodes, shape (J, K)."""
        return np.outer(self.scale_weights, self.rotation_weights)

    def nodes(self):
        """Yield ``(j, k, a, theta)`` in storage order."""
        for j, a in enumerate(self.scales):
            for k, theta in enumerate(self.rotations):
                yield j, k, a, theta

    def point(self, j: int, k: int, b_index: Sequence[int]) -> GroupPoint:
        b = [ax[i] for ax, i in zip(self.spatial.axes(), b_index)]
        return GroupPoint(self.scales[j], self.rotations[k], tuple(b))

    def with_rotations(self, rotations: Sequence[RotationParam]) -> "GroupGrid":
        return GroupGrid(self.scales, self.scale_weights, tuple(rotations), self.rotation_weights, self.spatial, self.meta)

    def to_dict(self) -> dict:
        rots = [r if self.n == 2 else list(r) for r in self.rotations]
        return {
            "scales": list(self.scales),
            "scale_weights": list(self.scale_weights),
            "rotations": rots,
            "rotation_weights": list(self.rotation_weights),
            "spatial": self.spatial.to_dict(),
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GroupGrid":
        spatial = GridSpec.from_dict(d["spatial"])
        rots = [float(r) if spatial.n == 2 else tuple(r) for r in d["rotations"]]
        return cls(tuple(d["scales"]), tuple(d["scale_weights"]), tuple(rots),
                   tuple(d["rotation_weights"]), spatial, d.get("meta", {}))


def log_scales(a_min: float, a_max: float, count: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Midpoint rule in ln(a): nodes and weights for the integral of da / a^(n+1)."""
    if count < 1:
        raise ValueError("need at least one scale")
    if not 0 < a_min <= a_max or (count > 1 and a_min == a_max):
        raise ValueError(f"need 0 < a_min < a_max, got [{a_min}, {a_max}]")
    h = math.log(a_max / a_min) / count
    a = a_min * np.exp((np.arange(count) + 0.5) * h)
    # a degenerate range keeps a unit log-width so the single node stays usable
    h = h or 1.0
    return a, h * a ** (-float(n))


def build_group_grid(
    scales: tuple[float, float, int],
    rotations: int,
    grid: GridSpec,
    so3: str = "superfibonacci",
) -> GroupGrid:
    a_min, a_max, J = scales
    if rotations < 1:
        raise ValueError("need at least one rotation")
    a, w = log_scales(a_min, a_max, int(J), grid.n)
    if grid.n == 2:
        rots = so2_uniform(rotations)
    elif so3 == "superfibonacci":
        rots = so3_superfibonacci(rotations)
    elif so3 == "octahedral":
        rots = so3_octahedral()
        if rotations != len(rots):
            raise ValueError("the octahedral set has exactly 24 rotations")
    else:
        raise ValueError(f"unknown SO(3) sampling {so3!r}")
    meta = {"a_min": a_min, "a_max": a_max, "J": int(J), "K": len(rots), "so3": so3 if grid.n == 3 else "uniform"}
    return GroupGrid(tuple(a), tuple(w), tuple(rots), (1.0 / len(rots),) * len(rots), grid, meta)


class WaveletCoefficients:
    """Values on a :class:`GroupGrid`, data shape ``(J, K, 2**n, N_1, ..., N_n)``."""

    __slots__ = ("grid", "data", "alg")

    def __init__(self, grid: GroupGrid, data: np.ndarray, copy: bool = True):
        alg = get_algebra(grid.n)
        # copy=False hands over a freshly computed array without duplicating it
        arr = np.array(data, dtype=float) if copy else np.asarray(data, dtype=float)
        expected = grid.shape + (alg.size,) + grid.spatial.shape
        if arr.shape != expected:
            raise GridMismatch(f"coefficient shape {arr.shape} does not match {expected}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("wavelet coefficients must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "alg", alg)

    def __setattr__(self, key, value):
        raise AttributeError("WaveletCoefficients is immutable")

    def at(self, j: int, k: int, b_index: Sequence[int]) -> Multivector:
        return Multivector(self.alg, self.data[(j, k, slice(None)) + tuple(b_index)])

    def node_field(self, j: int, k: int):
        from .field import MultivectorField

        return MultivectorField(self.grid.spatial, self.data[j, k])

    def weights(self) -> np.ndarray:
        """Full Haar weight per node, broadcastable against ``data``."""
        w = self.grid.measure_weights() * self.grid.spatial.cell_volume
        return w.reshape(w.shape + (1,) * (1 + self.grid.n))

    def __repr__(self) -> str:
        return f"WaveletCoefficients(J={self.grid.shape[0]}, K={self.grid.shape[1]}, grid={self.grid.spatial.shape})"


def l2g_inner_product(F: WaveletCoefficients, G: WaveletCoefficients) -> Multivector:
    if F.grid != G.grid:
        raise GridMismatch("coefficients live on different group grids")
    alg = F.alg
    w = F.grid.measure_weights() * F.grid.spatial.cell_volume
    total = np.zeros(alg.size)
    for j, k, _, _ in F.grid.nodes():
        prod = alg.product_arrays(F.data[j, k], alg.reverse_arrays(G.data[j, k]))
        total += w[j, k] * prod.reshape(alg.size, -1).sum(axis=1)
    return Multivector(alg, total)


def l2g_norm(F: WaveletCoefficients) -> float:
    w = F.grid.measure_weights() * F.grid.spatial.cell_volume
    # node by node keeps temporaries small for n=3
    total = sum(w[j, k] * float(np.sum(F.data[j, k] ** 2)) for j, k, _, _ in F.grid.nodes())
    return math.sqrt(total)
