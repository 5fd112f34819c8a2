"""Clifford mother/daughter wavelets and the SIM(n) wavelet transform.

Daughters are ``psi_{a,theta,b}(x) = a^(-n/2) psi(r_theta^{-1}((x - b)/a))``.
On the periodic sampling box they are periodized: every image of the
daughter under the box lattice is summed, so the discrete transform is an
exact circular correlation and its spectrum samples the continuous CFT of
the daughter.

Parity: for n=2 the mother must be purely even-graded (spinor wavelet,
``epsilon=+1``) or purely odd-graded (vector wavelet, ``epsilon=-1``); for
n=3 there is no restriction and ``epsilon=+1``.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import ndimage

from .clifford_core import (
    CliffordError,
    Multivector,
    NonInvertible,
    UnsupportedGradeContent,
    get_algebra,
    invert_grade01,
)
from .cft import cft_forward, cft_inverse, exp_sum
from .field import SPATIAL, SPECTRAL, GridMismatch, GridSpec, MultivectorField, inner_product, norm
from .simgroup import GroupGrid, GroupPoint, WaveletCoefficients, rotation_matrix

# Envelope cut-off for image sums: exp(-r^2 / 2 sigma^2) < 1e-17 beyond r = 8.85 sigma.
_GAUSS_RADIUS = 8.85


class ParityViolation(CliffordError):
    pass


class NotAdmissible(CliffordError):
    pass


def sphere_area(n: int) -> float:
    """Surface area of the unit sphere S^(n-1)."""
    return 2 * math.pi ** (n / 2) / math.gamma(n / 2)


@dataclass(frozen=True)
class MotherWavelet:
    """A Clifford mother wavelet.

    ``evaluate`` maps points ``(n, ...)`` to coefficients ``(2**n, ...)``;
    ``spectrum``, when known in closed form, does the same for its CFT.
    ``radius`` bounds the support (values beyond it are below double
    precision) and decides how many periodic images a daughter needs.
    """

    n: int
    evaluate: Callable[[np.ndarray], np.ndarray]
    radius: float
    epsilon: int = 1
    spectrum: Callable[[np.ndarray], np.ndarray] | None = None
    params: dict = field(default_factory=dict, compare=False)

    @property
    def alg(self):
        return get_algebra(self.n)

    def sample(self, grid: GridSpec) -> MultivectorField:
        return daughter(self, GroupPoint.identity(self.n), grid)

    def right_multiply(self, m: Multivector) -> "MotherWavelet":
        """The mother ``psi(x) * m``; right-multiplying by a vector flips the n=2 parity."""
        alg = self.alg
        R = alg.right_matrix(m.coeffs)
        ev = self.evaluate
        spec = self.spectrum

        def evaluate(points):
            return np.tensordot(R, ev(points), axes=1)

        if spec is None:
            new_spec = None
        else:
            # CFT(psi m)(w) = psi^(w) m for even m; odd m also flips w -> -w
            par = _multivector_parity(m)
            if par is None:
                raise ParityViolation("right factor must be parity-pure")

            flip = par < 0 and self.n == 2

            def new_spec(omega):
                return np.tensordot(R, spec(-omega if flip else omega), axes=1)

        eps = _mother_parity(self.n, evaluate, self.radius)
        params = dict(self.params, right_factor=list(m.coeffs))
        return MotherWavelet(self.n, evaluate, self.radius, eps, new_spec, params)


def _multivector_parity(m: Multivector) -> int | None:
    even, odd = m.even(), m.odd()
    if not np.any(odd.coeffs):
        return 1
    if not np.any(even.coeffs):
        return -1
    return None


def _mother_parity(n: int, evaluate, radius: float) -> int:
    if n == 3:
        return 1
    probe = GridSpec.centered(2, 33, 2 * radius)
    f = MultivectorField(probe, evaluate(probe.points()))
    par = f.parity(tol=1e-14)
    if par is None:
        raise ParityViolation("n=2 mother wavelets must be purely even-graded or purely odd-graded")
    return par


def gabor_mother(
    n: int,
    sigma: Sequence[float],
    omega0: Sequence[float],
    A: Multivector | None = None,
) -> MotherWavelet:
    """Gabor wavelet with a constant correction that removes its mean.

    ``psi(x) = A g(x) (exp(i_n w0.x) - exp(-sum sigma_k^2 w0_k^2 / 2))`` with
    ``g`` the unit-mass Gaussian of standard deviations ``sigma``. Its CFT is
    ``A (G(w - w0) - G(w0) G(w))`` with ``G(w) = exp(-sum sigma_k^2 w_k^2 / 2)``.
    """
    alg = get_algebra(n)
    sigma = np.asarray(sigma, dtype=float).reshape(-1)
    omega0 = np.asarray(omega0, dtype=float).reshape(-1)
    if sigma.shape != (n,) or omega0.shape != (n,):
        raise ValueError(f"sigma and omega0 need {n} components")
    if np.any(sigma <= 0):
        raise ValueError("sigma must be positive")
    A = alg.scalar(1.0) if A is None else A
    if A.n != n:
        raise CliffordError("amplitude lives in a different algebra")
    if n == 2 and _multivector_parity(A) is None:
        raise ParityViolation("for n=2 the Gabor amplitude A must be even-graded or odd-graded")
    if not np.any(omega0):
        warnings.warn("omega0 = 0 makes the Gabor wavelet identically zero", stacklevel=2)

    kappa = math.exp(-0.5 * float(np.sum(sigma**2 * omega0**2)))
    norm_const = 1.0 / ((2 * math.pi) ** (n / 2) * float(np.prod(sigma)))
    ai_coeffs = (A * alg.pseudoscalar()).coeffs

    def shape_(arr):
        return (-1,) + (1,) * (arr.ndim - 1)

    def evaluate(points):
        points = np.asarray(points, dtype=float)
        s = sigma.reshape(shape_(points))
        w0 = omega0.reshape(shape_(points))
        env = norm_const * np.exp(-0.5 * np.sum((points / s) ** 2, axis=0))
        phase = np.sum(w0 * points, axis=0)
        c = env * (np.cos(phase) - kappa)
        sn = env * np.sin(phase)
        return np.multiply.outer(A.coeffs, c) + np.multiply.outer(ai_coeffs, sn)

    def spectrum(omega):
        omega = np.asarray(omega, dtype=float)
        s2 = (sigma**2).reshape(shape_(omega))
        w0 = omega0.reshape(shape_(omega))
        g = np.exp(-0.5 * np.sum(s2 * (omega - w0) ** 2, axis=0)) - kappa * np.exp(-0.5 * np.sum(s2 * omega**2, axis=0))
        return np.multiply.outer(A.coeffs, g)

    eps = 1 if n == 3 else _multivector_parity(A)
    params = {"kind": "gabor", "n": n, "sigma": sigma.tolist(), "omega0": omega0.tolist(), "A": A.coeffs.tolist()}
    return MotherWavelet(n, evaluate, _GAUSS_RADIUS * float(sigma.max()), eps, spectrum, params)


def sampled_mother(f: MultivectorField) -> MotherWavelet:
    """Mother wavelet from samples; multilinear interpolation, zero outside the box."""
    if f.domain != SPATIAL:
        raise GridMismatch("mother wavelet samples must be spatial")
    grid = f.grid
    data = np.array(f.data)
    lower = np.array(grid.lower)
    spacing = grid.spacing

    def evaluate(points):
        points = np.asarray(points, dtype=float)
        idx = (points - lower.reshape((-1,) + (1,) * (points.ndim - 1))) / spacing.reshape((-1,) + (1,) * (points.ndim - 1))
        flat = idx.reshape(grid.n, -1)
        out = np.stack([
            ndimage.map_coordinates(data[b], flat, order=1, mode="constant", cval=0.0)
            for b in range(data.shape[0])
        ])
        return out.reshape((data.shape[0],) + points.shape[1:])

    corners = np.maximum(np.abs(grid.lower), np.abs(grid.upper))
    radius = float(np.linalg.norm(corners))
    eps = 1 if f.n == 3 else f.parity(tol=0.0)
    if eps is None:
        raise ParityViolation("n=2 mother wavelets must be purely even-graded or purely odd-graded")
    params = {"kind": "sampled", "grid": grid.to_dict()}
    return MotherWavelet(f.n, evaluate, radius, eps, None, params)


# -- daughters -----------------------------------------------------------------

def _image_range(grid: GridSpec, reach: float) -> list[np.ndarray]:
    """Lattice shifts ``k * L`` whose copy of a support of radius ``reach`` can touch the box."""
    kmax = [int(math.floor(reach / L + 0.5)) for L in grid.lengths]
    ranges = [np.arange(-k, k + 1) for k in kmax]
    shifts = np.stack(np.meshgrid(*ranges, indexing="ij")).reshape(grid.n, -1)
    return [shifts[:, i] * grid.lengths for i in range(shifts.shape[1])]


def periodized_values(psi: MotherWavelet, a: float, theta, displacement: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Sum over box images of ``a^(-n/2) psi(r^{-1} d / a)`` for displacements ``d = x - b``."""
    d = grid.wrap(displacement)
    rinv = rotation_matrix(theta, psi.n).T
    out = None
    for shift in _image_range(grid, a * psi.radius):
        y = np.tensordot(rinv, (d + shift.reshape((-1,) + (1,) * (d.ndim - 1))) / a, axes=1)
        vals = psi.evaluate(y)
        out = vals if out is None else out + vals
    return out * a ** (-psi.n / 2)


def daughter(psi: MotherWavelet, g: GroupPoint, grid: GridSpec, periodic: bool = True) -> MultivectorField:
    """Sample the daughter wavelet at group point ``g`` on ``grid``."""
    if grid.n != psi.n or g.n != psi.n:
        raise GridMismatch("dimension mismatch between wavelet, group point and grid")
    x = grid.points()
    disp = x - np.array(g.b).reshape((-1,) + (1,) * grid.n)
    if periodic:
        return MultivectorField(grid, periodized_values(psi, g.a, g.theta, disp, grid))
    return MultivectorField(grid, psi.evaluate(g.inverse_apply(x)) * g.a ** (-psi.n / 2))


def _lattice_grid(grid: GridSpec) -> GridSpec:
    """Grid of displacements k * spacing centred on the origin."""
    lower = tuple(-(N // 2) * d for N, d in zip(grid.shape, grid.spacing))
    return GridSpec(lower, tuple(lo + L for lo, L in zip(lower, grid.lengths)), grid.shape)


# "auto" keeps the closed form only while the daughter spectrum has decayed
# to this fraction of its peak at the edge of the frequency box
ALIAS_TOL = 1e-8


def resolve_spectrum_mode(psi: MotherWavelet, mode: str) -> str:
    """``"auto"`` stays ``"auto"`` when a closed form exists (decided per node)."""
    if mode == "auto":
        return "auto" if psi.spectrum is not None else "sampled"
    if mode not in ("analytic", "sampled"):
        raise ValueError(f"unknown spectrum mode {mode!r}")
    if mode == "analytic" and psi.spectrum is None:
        raise ValueError("this mother wavelet has no closed-form spectrum")
    return mode


def daughter_spectrum(psi: MotherWavelet, a: float, theta, grid: GridSpec, mode: str = "auto") -> np.ndarray:
    """CFT of the b=0 daughter on the frequency grid of ``grid``.

    ``mode="sampled"`` transforms the periodized samples on the displacement
    lattice, which makes the spectral transform identical to the direct sum;
    ``mode="analytic"`` evaluates ``a^(n/2) psi^(a r^{-1} w)`` in closed form
    and differs from it only by aliasing; ``mode="auto"`` uses the closed
    form unless the daughter reaches the edge of the frequency box.
    """
    mode = resolve_spectrum_mode(psi, mode)
    if mode in ("analytic", "auto"):
        spec = _analytic_spectrum(psi, a, theta, grid)
        if mode == "analytic" or not _reaches_edge(spec, grid):
            return spec
    lat = _lattice_grid(grid)
    d = periodized_values(psi, a, theta, lat.points(), lat)
    return cft_forward(MultivectorField(lat, d)).data


def _analytic_spectrum(psi: MotherWavelet, a: float, theta, grid: GridSpec) -> np.ndarray:
    w = grid.frequencies()
    rinv = rotation_matrix(theta, psi.n).T
    return psi.spectrum(a * np.tensordot(rinv, w, axes=1)) * a ** (psi.n / 2)


def _reaches_edge(spec: np.ndarray, grid: GridSpec) -> bool:
    """True if the spectrum is not negligible on the outermost frequency bins."""
    mod = np.sqrt(np.sum(spec**2, axis=0))
    peak = mod.max()
    if peak == 0.0:
        return False
    edge = np.zeros(grid.shape, dtype=bool)
    for axis, N in enumerate(grid.shape):
        idx = [slice(None)] * grid.n
        idx[axis] = [N // 2, (N - 1) // 2 + 1] if N > 1 else [0]
        edge[tuple(idx)] = True
    return bool(mod[edge].max() > ALIAS_TOL * peak)


def lattice_daughter(psi: MotherWavelet, a: float, theta, grid: GridSpec, mode: str = "auto") -> np.ndarray:
    """b=0 daughter on the displacement lattice ``k * spacing``, FFT order."""
    mode = resolve_spectrum_mode(psi, mode)
    lat = _lattice_grid(grid)
    if mode != "sampled":
        values = _analytic_spectrum(psi, a, theta, lat)
        if mode == "auto" and _reaches_edge(values, lat):
            mode = "sampled"
    if mode == "sampled":
        return periodized_values(psi, a, theta, lat.offsets(), lat)
    spec = MultivectorField(lat, values, SPECTRAL)
    axes = tuple(range(1, grid.n + 1))
    centred = cft_inverse(spec).data
    # lattice points run from -(N//2) * spacing; move the origin to index 0
    return np.roll(centred, tuple(-(N // 2) for N in grid.shape), axis=axes)


# -- admissibility -------------------------------------------------------------

@dataclass(frozen=True)
class AdmissibilityConstant:
    """C_psi with its inverse and the constant C'_psi entering synthesis.

    ``value`` is normalized for an SO(n) Haar measure of total mass 1, i.e.
    it is the frequency integral of ``psi^~ psi^ / |w|^n`` divided by the
    area of S^(n-1).
    """

    value: Multivector
    inverse: Multivector
    c_prime: Multivector
    c_prime_inverse: Multivector
    epsilon: int
    sign: int = 1
    grid: GridSpec | None = field(default=None, compare=False)

    @property
    def is_scalar(self) -> bool:
        vec = self.value.grade(1).norm()
        return vec <= 1e-8 * self.value.norm()

    def to_dict(self) -> dict:
        return {
            "value": list(self.value.coeffs),
            "inverse": list(self.inverse.coeffs),
            "c_prime": list(self.c_prime.coeffs),
            "epsilon": self.epsilon,
            "sign": self.sign,
        }


def c_prime_sign(n: int, epsilon: int) -> int:
    """Sign s in C'_psi = s C_psi.

    (T f, T f) over the group is a positive quantity, and the spectral form
    of the transform gives (T f, T g) = (f C_psi, g) for every supported
    (n, epsilon): both parities for n=2 and epsilon=+1 for n=3.
    """
    if n not in (2, 3) or epsilon not in (1, -1) or (n == 3 and epsilon != 1):
        raise ValueError(f"unsupported (n, epsilon) = ({n}, {epsilon})")
    return 1


def refined_grid(grid: GridSpec, radius: float) -> GridSpec:
    """Same spacing, box enlarged by an integer factor until it holds a support of ``radius``."""
    factor = max(1, int(math.ceil(2 * radius / float(grid.lengths.min()))))
    centre = (np.array(grid.lower) + np.array(grid.upper)) / 2
    half = grid.lengths * factor / 2
    shape = tuple(N * factor for N in grid.shape)
    return GridSpec(tuple(centre - half), tuple(centre + half), shape)


def zero_mean_residuals(psi_field: MultivectorField) -> tuple[np.ndarray, float]:
    """Per-blade integrals and the tolerance they must stay under."""
    means = psi_field.component_integrals()
    tol = 1e-8 * norm(psi_field) * math.sqrt(psi_field.grid.volume)
    return means, tol


def admissibility(psi: MotherWavelet, grid: GridSpec, refine: bool = True) -> AdmissibilityConstant:
    """Admissibility constant by quadrature over the frequency grid, DC bin dropped.

    With ``refine`` the mother is sampled on an enlarged box (same spacing)
    that contains its support, which makes the frequency-grid Riemann sum
    spectrally accurate.
    """
    qgrid = refined_grid(grid, psi.radius) if refine else grid
    samples = psi.sample(qgrid)
    means, tol = zero_mean_residuals(samples)
    if not np.all(np.isfinite(samples.data)):
        raise NotAdmissible("mother wavelet has non-finite samples")
    if np.any(np.abs(means) > tol):
        raise NotAdmissible(f"mother wavelet components do not have zero mean: max |mean| = {np.abs(means).max():.3e} > {tol:.3e}")
    alg = samples.alg
    spec = cft_forward(samples).data
    w = qgrid.frequencies()
    r2 = np.sum(w**2, axis=0)
    weight = np.zeros_like(r2)
    nz = r2 > 0
    weight[nz] = r2[nz] ** (-psi.n / 2)
    integrand = alg.product_arrays(alg.reverse_arrays(spec), spec) * weight
    value = integrand.reshape(alg.size, -1).sum(axis=1) * qgrid.frequency_cell_volume / sphere_area(psi.n)
    C = Multivector(alg, value)
    if not np.all(np.isfinite(value)):
        raise NotAdmissible("admissibility integral is not finite")
    if C.scalar <= 0:
        raise NotAdmissible("scalar part of C_psi is not positive")
    low = C.grade(0) + C.grade(1)
    if (C - low).norm() > 1e-8 * C.norm():
        raise NotAdmissible(f"C_psi has grades beyond {{0, 1}}: {sorted(C.grades_present(1e-8 * C.norm()))}")
    try:
        inv = invert_grade01(low)
    except (NonInvertible, UnsupportedGradeContent) as exc:
        raise NotAdmissible(f"C_psi is not invertible: {exc}") from exc
    s = c_prime_sign(psi.n, psi.epsilon)
    return AdmissibilityConstant(low, inv, low * s, inv * s, psi.epsilon, s, qgrid)


# -- transforms ----------------------------------------------------------------

def _check_inputs(psi: MotherWavelet, f: MultivectorField, grid: GroupGrid) -> None:
    if f.domain != SPATIAL:
        raise GridMismatch("signal must be a spatial field")
    if f.grid != grid.spatial:
        raise GridMismatch("signal grid differs from the group grid's translations")
    if psi.n != f.n:
        raise GridMismatch("wavelet and signal dimensions differ")
    if psi.n == 2 and psi.epsilon not in (1, -1):
        raise ParityViolation("n=2 transform needs a parity-pure mother wavelet")


def _iter_nodes(fn, grid: GroupGrid, threads: int | None):
    """``fn(j, k, a, theta)`` over all nodes, in storage order, a bounded batch at a time."""
    nodes = list(grid.nodes())
    if not threads or threads <= 1:
        for node in nodes:
            yield fn(*node)
        return
    batch = 4 * threads
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for start in range(0, len(nodes), batch):
            yield from pool.map(lambda node: fn(*node), nodes[start:start + batch])


def transform_direct(psi: MotherWavelet, f: MultivectorField, grid: GroupGrid, chunk: int = 64) -> WaveletCoefficients:
    """T f(a, theta, b) = sum_x f(x) psi_{a,theta,b}(x)~ dx, node by node and shift by shift."""
    _check_inputs(psi, f, grid)
    alg = f.alg
    spatial = grid.spatial
    x = spatial.points().reshape(spatial.n, -1)
    bs = x
    fr = f.data.reshape(alg.size, 1, -1)
    out = np.zeros(grid.shape + (alg.size, spatial.size))
    dv = spatial.cell_volume
    for j, k, a, theta in grid.nodes():
        for start in range(0, bs.shape[1], chunk):
            b = bs[:, start:start + chunk]
            disp = x[:, None, :] - b[:, :, None]
            d = periodized_values(psi, a, theta, disp, spatial)
            prod = alg.product_arrays(fr, alg.reverse_arrays(d))
            out[j, k, :, start:start + chunk] = prod.sum(axis=-1) * dv
    return WaveletCoefficients(grid, out.reshape(grid.shape + (alg.size,) + spatial.shape))


def transform_spectral(
    psi: MotherWavelet,
    f: MultivectorField,
    grid: GroupGrid,
    spectrum: str = "auto",
    threads: int | None = None,
) -> WaveletCoefficients:
    """(2 pi)^-n int f^(w) a^(n/2) {psi^(a r^{-1} w)}~ exp(eps i_n b.w) dw, one FFT per (a, theta)."""
    _check_inputs(psi, f, grid)
    alg = f.alg
    F = cft_forward(f).data
    spatial = grid.spatial

    def node(j, k, a, theta):
        Psi = daughter_spectrum(psi, a, theta, spatial, spectrum)
        P = alg.product_arrays(F, alg.reverse_arrays(Psi))
        return exp_sum(P, spatial, psi.epsilon, SPECTRAL)

    out = np.empty(grid.shape + (alg.size,) + spatial.shape)
    flat = out.reshape((-1, alg.size) + spatial.shape)
    for i, values in enumerate(_iter_nodes(node, grid, threads)):
        flat[i] = values
    return WaveletCoefficients(grid, out, copy=False)


def inverse_transform(
    W: WaveletCoefficients,
    psi: MotherWavelet,
    C: AdmissibilityConstant,
    spectrum: str = "auto",
    threads: int | None = None,
) -> MultivectorField:
    """Haar-weighted synthesis  sum_g T f(g) psi_g C'^{-1} dmu d^n b.

    Evaluated in frequency: the b-sum of ``T(b) psi_{a,theta,b}`` has CFT
    ``T^(eps w) Psi_{a,theta}(w)``.
    """
    grid = W.grid
    if psi.n != grid.n:
        raise GridMismatch("wavelet and coefficient dimensions differ")
    if C.epsilon != psi.epsilon:
        raise ParityViolation("admissibility constant was computed for a different parity")
    alg = W.alg
    spatial = grid.spatial
    mu = grid.measure_weights()

    def node(j, k, a, theta):
        That = exp_sum(W.data[j, k], spatial, -psi.epsilon, SPATIAL)
        Psi = daughter_spectrum(psi, a, theta, spatial, spectrum)
        return mu[j, k] * alg.product_arrays(That, Psi)

    acc = np.zeros((alg.size,) + spatial.shape)
    for term in _iter_nodes(node, grid, threads):
        acc += term
    rec = cft_inverse(MultivectorField(spatial, acc, SPECTRAL))
    return rec.scale_right(C.c_prime_inverse)


def synthesis_direct(W: WaveletCoefficients, psi: MotherWavelet, C: AdmissibilityConstant) -> MultivectorField:
    """Spatial-domain synthesis sum over every group node; slow reference path."""
    grid = W.grid
    spatial = grid.spatial
    alg = W.alg
    x = spatial.points().reshape(spatial.n, -1)
    mu = grid.measure_weights() * spatial.cell_volume
    acc = np.zeros((alg.size, spatial.size))
    for j, k, a, theta in grid.nodes():
        T = W.data[j, k].reshape(alg.size, -1)
        for i in range(x.shape[1]):
            d = periodized_values(psi, a, theta, x - x[:, i:i + 1], spatial)
            acc += mu[j, k] * alg.product_arrays(T[:, i:i + 1], d)
    return MultivectorField(spatial, acc.reshape((alg.size,) + spatial.shape)).scale_right(C.c_prime_inverse)


# -- reproducing kernel --------------------------------------------------------

def reproducing_kernel(psi: MotherWavelet, C: AdmissibilityConstant, g: GroupPoint, g2: GroupPoint, grid: GridSpec) -> Multivector:
    """K(g; g') = (psi_g C'^{-1}, psi_g')."""
    d1 = daughter(psi, g, grid).scale_right(C.c_prime_inverse)
    return inner_product(d1, daughter(psi, g2, grid))


def _node_spectrum(psi: MotherWavelet, a: float, theta, spatial: GridSpec, mode: str) -> np.ndarray:
    """Conjugated FFT of the lattice b=0 daughter at one (a, theta)."""
    axes = tuple(range(1, spatial.n + 1))
    return np.conj(np.fft.fftn(lattice_daughter(psi, a, theta, spatial, mode), axes=axes))


def _probe_spectrum(psi: MotherWavelet, C: AdmissibilityConstant, g2: GroupPoint, spatial: GridSpec) -> np.ndarray:
    axes = tuple(range(1, spatial.n + 1))
    other = daughter(psi, g2, spatial).reverse().scale_left(C.c_prime_inverse)
    return np.fft.fftn(other.data, axes=axes)


def _correlate(alg, Dc: np.ndarray, Y: np.ndarray, spatial: GridSpec) -> np.ndarray:
    """sum_y D(y) Y(y + b) with the Clifford product, for every shift b."""
    acc = np.zeros(Dc.shape, dtype=complex)
    for p in range(alg.size):
        for q in range(alg.size):
            acc[alg.mul_index[p, q]] += alg.mul_sign[p, q] * Dc[p] * Y[q]
    return np.fft.ifftn(acc, axes=tuple(range(1, spatial.n + 1))).real * spatial.cell_volume


def kernel_fields(
    psi: MotherWavelet,
    C: AdmissibilityConstant,
    grid: GroupGrid,
    g2: GroupPoint,
    mode: str = "auto",
) -> np.ndarray:
    """K(a, theta, b; g') for every group node, shaped like coefficient data.

    For fixed (a, theta) the kernel is a correlation over b of the b=0
    daughter with ``C'^{-1} psi_g'~``, done blade pair by blade pair with FFTs.
    """
    spatial = grid.spatial
    alg = get_algebra(spatial.n)
    Y = _probe_spectrum(psi, C, g2, spatial)
    out = np.zeros(grid.shape + (alg.size,) + spatial.shape)
    for j, k, a, theta in grid.nodes():
        out[j, k] = _correlate(alg, _node_spectrum(psi, a, theta, spatial, mode), Y, spatial)
    return out


def reproduce(
    W: WaveletCoefficients,
    psi: MotherWavelet,
    C: AdmissibilityConstant,
    probes: Sequence[GroupPoint],
    mode: str = "auto",
) -> list[Multivector]:
    """int_G T f(g) K(g; g') d lambda(g) for each probe g'."""
    alg = W.alg
    spatial = W.grid.spatial
    w = W.grid.measure_weights() * spatial.cell_volume
    Ys = [_probe_spectrum(psi, C, g2, spatial) for g2 in probes]
    totals = np.zeros((len(probes), alg.size))
    for j, k, a, theta in W.grid.nodes():
        Dc = _node_spectrum(psi, a, theta, spatial, mode)
        T = W.data[j, k]
        for i, Y in enumerate(Ys):
            K = _correlate(alg, Dc, Y, spatial)
            totals[i] += w[j, k] * alg.product_arrays(T, K).reshape(alg.size, -1).sum(axis=1)
    return [Multivector(alg, t) for t in totals]


def transform_at(psi: MotherWavelet, f: MultivectorField, g: GroupPoint) -> Multivector:
    """T f at a single group point, straight from the definition."""
    return inner_product(f, daughter(psi, g, f.grid))
