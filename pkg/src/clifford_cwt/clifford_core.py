"""Dense arithmetic in the Euclidean Clifford algebra Cl(n,0), n in {2, 3}.

Blades are stored as bitmasks (bit k set <=> generator e_{k+1} present) and
laid out in a fixed canonical order: by grade, then lexicographically by
generator index::

    n=2: 1, e1, e2, e12
    n=3: 1, e1, e2, e3, e12, e13, e23, e123

Names with other index orders are accepted on input and normalized with the
permutation sign, e.g. ``e31 == -e13``.
"""

from __future__ import annotations

import functools
import hashlib
import math
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

SUPPORTED_DIMS = (2, 3)


class CliffordError(ValueError):
    """Base class for algebra errors."""


class DimensionMismatch(CliffordError):
    pass


class NonInvertible(CliffordError):
    pass


class UnsupportedGradeContent(CliffordError):
    pass


def _reorder_sign(a: int, b: int) -> int:
    """Sign from moving the generators of blade ``b`` past those of ``a``."""
    a >>= 1
    swaps = 0
    while a:
        swaps += bin(a & b).count("1")
        a >>= 1
    return -1 if swaps & 1 else 1


def _mask_name(mask: int) -> str:
    if mask == 0:
        return "1"
    return "e" + "".join(str(k + 1) for k in range(8) if mask >> k & 1)


class Algebra:
    """Blade layout and multiplication tables for Cl(n,0)."""

    def __init__(self, n: int):
        if n not in SUPPORTED_DIMS:
            raise CliffordError(f"unsupported dimension n={n}; expected one of {SUPPORTED_DIMS}")
        self.n = n
        self.size = 1 << n
        masks = [0]
        for k in range(1, n + 1):
            for combo in combinations(range(n), k):
                masks.append(sum(1 << c for c in combo))
        self.masks = tuple(masks)
        self.index_of = {m: i for i, m in enumerate(masks)}
        self.grades = np.array([bin(m).count("1") for m in masks])
        self.names = tuple(_mask_name(m) for m in masks)

        size = self.size
        self.mul_index = np.zeros((size, size), dtype=np.intp)
        self.mul_sign = np.zeros((size, size))
        self.outer_sign = np.zeros((size, size))
        for i, a in enumerate(masks):
            for j, b in enumerate(masks):
                s = _reorder_sign(a, b)
                self.mul_index[i, j] = self.index_of[a ^ b]
                self.mul_sign[i, j] = s
                if a & b == 0:
                    self.outer_sign[i, j] = s
        self.reverse_signs = np.array([(-1.0) ** (g * (g - 1) // 2) for g in self.grades])
        self.even_mask = self.grades % 2 == 0
        self.pseudoscalar_index = size - 1
        # (M i_n)_k = right_pseudo_sign[k] * M_{right_pseudo_perm[k]}
        self.right_pseudo_perm = np.empty(size, dtype=np.intp)
        self.right_pseudo_sign = np.empty(size)
        for j in range(size):
            k = self.mul_index[j, size - 1]
            self.right_pseudo_perm[k] = j
            self.right_pseudo_sign[k] = self.mul_sign[j, size - 1]

    def __repr__(self) -> str:
        return f"Algebra(n={self.n})"

    def __reduce__(self):
        return (get_algebra, (self.n,))

    @property
    def blade_order(self) -> str:
        return ",".join(self.names)

    @property
    def blade_digest(self) -> bytes:
        """8-byte fingerprint of the blade layout, stored in file headers."""
        return hashlib.sha256(f"Cl({self.n},0):{self.blade_order}".encode()).digest()[:8]

    # -- constructors -------------------------------------------------------
    def multivector(self, coeffs: Iterable[float]) -> "Multivector":
        return Multivector(self, coeffs)

    def zero(self) -> "Multivector":
        return Multivector(self, np.zeros(self.size))

    def scalar(self, value: float) -> "Multivector":
        c = np.zeros(self.size)
        c[0] = value
        return Multivector(self, c)

    def vector(self, components: Sequence[float]) -> "Multivector":
        if len(components) != self.n:
            raise DimensionMismatch(f"vector needs {self.n} components, got {len(components)}")
        c = np.zeros(self.size)
        for k, v in enumerate(components):
            c[self.index_of[1 << k]] = v
        return Multivector(self, c)

    def blade(self, name: str) -> "Multivector":
        """Unit blade from a name such as ``"1"``, ``"e2"``, ``"e31"``."""
        name = name.strip()
        if name in ("1", "e", "e0", ""):
            return self.scalar(1.0)
        if not name.startswith("e") or not name[1:].isdigit():
            raise CliffordError(f"bad blade name {name!r}")
        gens = [int(ch) - 1 for ch in name[1:]]
        if any(g < 0 or g >= self.n for g in gens):
            raise CliffordError(f"blade {name!r} outside Cl({self.n},0)")
        result = self.scalar(1.0)
        for g in gens:
            result = result * self.vector([1.0 if k == g else 0.0 for k in range(self.n)])
        return result

    def pseudoscalar(self) -> "Multivector":
        c = np.zeros(self.size)
        c[-1] = 1.0
        return Multivector(self, c)

    def exp_pseudoscalar(self, angle: float) -> "Multivector":
        """cos(angle) + i_n sin(angle)."""
        c = np.zeros(self.size)
        c[0] = math.cos(angle)
        c[-1] = math.sin(angle)
        return Multivector(self, c)

    def random(self, rng: np.random.Generator, grades: Iterable[int] | None = None) -> "Multivector":
        c = rng.standard_normal(self.size)
        if grades is not None:
            keep = np.isin(self.grades, list(grades))
            c = np.where(keep, c, 0.0)
        return Multivector(self, c)

    # -- array kernels (blade axis first) -----------------------------------
    def product_arrays(self, lhs: np.ndarray, rhs: np.ndarray) -> np.ndarray:
        """Geometric product of coefficient arrays shaped ``(2**n, ...)``."""
        lhs = np.asarray(lhs)
        rhs = np.asarray(rhs)
        shape = np.broadcast_shapes(lhs.shape[1:], rhs.shape[1:])
        dtype = np.result_type(lhs, rhs)
        out = np.zeros((self.size,) + shape, dtype=dtype)
        for i in range(self.size):
            for j in range(self.size):
                out[self.mul_index[i, j]] += self.mul_sign[i, j] * (lhs[i] * rhs[j])
        return out

    def left_matrix(self, m: np.ndarray) -> np.ndarray:
        """Matrix L with ``L @ x == coeffs(m * x)``."""
        mat = np.zeros((self.size, self.size))
        for i in range(self.size):
            for j in range(self.size):
                mat[self.mul_index[i, j], j] += self.mul_sign[i, j] * m[i]
        return mat

    def right_matrix(self, m: np.ndarray) -> np.ndarray:
        """Matrix R with ``R @ x == coeffs(x * m)``."""
        mat = np.zeros((self.size, self.size))
        for i in range(self.size):
            for j in range(self.size):
                mat[self.mul_index[i, j], i] += self.mul_sign[i, j] * m[j]
        return mat

    def reverse_arrays(self, arr: np.ndarray) -> np.ndarray:
        arr = np.asarray(arr)
        return arr * self.reverse_signs.reshape((-1,) + (1,) * (arr.ndim - 1))

    def parity_pairs(self) -> list[tuple[int, int, float]]:
        """Blade pairs (A, B, s) with ``e_A i_n = s e_B``, covering every blade once."""
        pairs = []
        seen = set()
        for i in range(self.size):
            if i in seen:
                continue
            j = int(self.mul_index[i, -1])
            pairs.append((i, j, float(self.mul_sign[i, -1])))
            seen.update((i, j))
        return pairs


@functools.lru_cache(maxsize=None)
def get_algebra(n: int) -> Algebra:
    return Algebra(n)


class Multivector:
    """Immutable element of Cl(n,0) with dense real coefficients."""

    __slots__ = ("alg", "coeffs")
    __array_priority__ = 100  # numpy scalars defer to our operators

    def __init__(self, alg: Algebra | int, coeffs: Iterable[float]):
        if isinstance(alg, int):
            alg = get_algebra(alg)
        arr = np.array(coeffs, dtype=float).reshape(-1)
        if arr.shape != (alg.size,):
            raise DimensionMismatch(f"Cl({alg.n},0) needs {alg.size} coefficients, got {arr.shape[0]}")
        arr.setflags(write=False)
        object.__setattr__(self, "alg", alg)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, key, value):
        raise AttributeError("Multivector is immutable")

    @property
    def n(self) -> int:
        return self.alg.n

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "Multivector":
        if isinstance(other, Multivector):
            if other.alg.n != self.alg.n:
                raise DimensionMismatch(f"Cl({self.n},0) vs Cl({other.n},0)")
            return other
        if np.isscalar(other):
            return self.alg.scalar(float(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Multivector(self.alg, self.coeffs + other.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Multivector(self.alg, self.coeffs - other.coeffs)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        return Multivector(self.alg, -self.coeffs)

    def __mul__(self, other):
        if np.isscalar(other):
            return Multivector(self.alg, self.coeffs * float(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return geometric_product(self, other)

    def __rmul__(self, other):
        if np.isscalar(other):
            return Multivector(self.alg, self.coeffs * float(other))
        return NotImplemented

    def __truediv__(self, other):
        if np.isscalar(other):
            return Multivector(self.alg, self.coeffs / float(other))
        return NotImplemented

    def __xor__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return outer_product(self, other)

    def __eq__(self, other):
        if not isinstance(other, Multivector):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.coeffs, other.coeffs))

    __hash__ = None

    def __getitem__(self, name: str) -> float:
        """Coefficient of a canonical blade, e.g. ``m["e12"]``."""
        b = self.alg.blade(name)
        k = int(np.flatnonzero(b.coeffs)[0])
        return float(self.coeffs[k] * b.coeffs[k])

    # -- unary operations ---------------------------------------------------
    def reverse(self) -> "Multivector":
        return reverse(self)

    def grade(self, k: int) -> "Multivector":
        return grade_project(self, k)

    @property
    def scalar(self) -> float:
        return float(self.coeffs[0])

    def even(self) -> "Multivector":
        return parity_split(self)[0]

    def odd(self) -> "Multivector":
        return parity_split(self)[1]

    def norm(self) -> float:
        return modulus(self)

    def allclose(self, other, atol: float = 1e-12, rtol: float = 0.0) -> bool:
        other = self._coerce(other)
        return bool(np.allclose(self.coeffs, other.coeffs, atol=atol, rtol=rtol))

    def grades_present(self, tol: float = 0.0) -> set[int]:
        return {int(g) for g, c in zip(self.alg.grades, self.coeffs) if abs(c) > tol}

    def __repr__(self) -> str:
        terms = [f"{c:+.6g}{'' if name == '1' else '*' + name}"
                 for c, name in zip(self.coeffs, self.alg.names) if c != 0.0]
        return "Multivector(" + (" ".join(terms) if terms else "0") + f"; n={self.n})"


def _check_same(a: Multivector, b: Multivector) -> None:
    if a.alg.n != b.alg.n:
        raise DimensionMismatch(f"Cl({a.n},0) vs Cl({b.n},0)")


def geometric_product(lhs: Multivector, rhs: Multivector) -> Multivector:
    _check_same(lhs, rhs)
    return Multivector(lhs.alg, lhs.alg.product_arrays(lhs.coeffs, rhs.coeffs))


def outer_product(lhs: Multivector, rhs: Multivector) -> Multivector:
    _check_same(lhs, rhs)
    alg = lhs.alg
    out = np.zeros(alg.size)
    for i in range(alg.size):
        for j in range(alg.size):
            out[alg.mul_index[i, j]] += alg.outer_sign[i, j] * lhs.coeffs[i] * rhs.coeffs[j]
    return Multivector(alg, out)


def reverse(m: Multivector) -> Multivector:
    return Multivector(m.alg, m.coeffs * m.alg.reverse_signs)


def grade_project(m: Multivector, k: int) -> Multivector:
    if not 0 <= k <= m.n:
        raise CliffordError(f"grade {k} outside 0..{m.n}")
    return Multivector(m.alg, np.where(m.alg.grades == k, m.coeffs, 0.0))


def scalar_product(m: Multivector, other: Multivector) -> float:
    """M * N~ = <M N~>_0, which in Cl(n,0) is the coefficient dot product."""
    _check_same(m, other)
    return float(np.dot(m.coeffs, other.coeffs))


def modulus(m: Multivector) -> float:
    return math.sqrt(scalar_product(m, m))


def pseudoscalar(n: int) -> Multivector:
    return get_algebra(n).pseudoscalar()


def dual(b: Multivector) -> Multivector:
    """B* = B i_n^{-1}; for n = 2, 3 the inverse pseudoscalar is -i_n."""
    return b * (-b.alg.pseudoscalar())


def exp_pseudoscalar(n: int, angle: float) -> Multivector:
    return get_algebra(n).exp_pseudoscalar(angle)


def parity_split(m: Multivector) -> tuple[Multivector, Multivector]:
    even = np.where(m.alg.even_mask, m.coeffs, 0.0)
    return Multivector(m.alg, even), Multivector(m.alg, m.coeffs - even)


def subspace_contains(b: Multivector, x: Multivector, rel_tol: float = 1e-12) -> bool:
    """True iff the vector ``x`` lies in the subspace of the blade ``b`` (x ^ B = 0)."""
    _check_same(b, x)
    if x.grades_present() - {1}:
        raise CliffordError("subspace_contains expects a grade-1 vector")
    wedge = outer_product(x, b)
    return modulus(wedge) <= rel_tol * modulus(x) * modulus(b)


def invert_grade01(m: Multivector, rel_tol: float = 1e-12) -> Multivector:
    """Inverse of a scalar-plus-vector multivector: (s - v) / (s^2 - v^2)."""
    s = m.coeffs[0]
    vec = np.where(m.alg.grades == 1, m.coeffs, 0.0)
    rest = m.coeffs.copy()
    rest[0] = 0.0
    rest = np.where(m.alg.grades == 1, 0.0, rest)
    v2 = float(np.dot(vec, vec))
    scale = s * s + v2
    if np.linalg.norm(rest) > rel_tol * math.sqrt(max(scale, np.dot(m.coeffs, m.coeffs))):
        raise UnsupportedGradeContent(f"grades {sorted(m.grades_present() - {0, 1})} present")
    denom = s * s - v2
    if abs(denom) <= rel_tol * scale or scale == 0.0:
        raise NonInvertible("<m>_0^2 equals <m>_1^2")
    inv = -vec / denom
    inv[0] = s / denom
    return Multivector(m.alg, inv)
