"""Numerical checks of the transform identities and the uncertainty principles.

Every check yields a :class:`Check` (name, measured value, tolerance,
verdict) and :func:`run_identity_suite` collects them into a report whose
text form has one check per line.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .clifford_core import CliffordError, Multivector, get_algebra, scalar_product
from .cft import cft_forward, cft_inverse, cft_parity_behavior_check, exp_sum
from .clwf import atomic_write
from .field import SPATIAL, SPECTRAL, GridSpec, MultivectorField, inner_product, norm
from .profile import Profile, build_mother
from .simgroup import (
    GroupGrid,
    GroupPoint,
    WaveletCoefficients,
    axis_angle,
    compose_rotations,
    l2g_inner_product,
    l2g_norm,
    rotation_matrix,
)
from .wavelet import (
    AdmissibilityConstant,
    MotherWavelet,
    NotAdmissible,
    admissibility,
    daughter,
    daughter_spectrum,
    inverse_transform,
    reproduce,
    reproducing_kernel,
    transform_at,
    transform_direct,
    transform_spectral,
    zero_mean_residuals,
)


class NonScalarConstant(CliffordError):
    pass


REPORT_HEADER = [
    "# columns: name measured tolerance verdict",
    "# names ending in _min must reach the tolerance from above; all others must stay at or below it",
    "# frequency factor of the general uncertainty check is C * (w f^, w f^) with w f^ the pointwise"
    " geometric product of the frequency vector and the spectrum; the placement of reversion is"
    " immaterial here because both pairings are reverse-symmetric",
    "# SO(n) Haar measure has unit mass; C' = C for every supported parity",
]


@dataclass
class Check:
    name: str
    measured: float
    tolerance: float
    at_least: bool = False
    note: str = ""

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.measured):
            return False
        return self.measured >= self.tolerance if self.at_least else self.measured <= self.tolerance

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"{self.name} {self.measured:.6e} {self.tolerance:.3e} {verdict}"


@dataclass
class SuiteReport:
    checks: list = field(default_factory=list)
    header: list = field(default_factory=lambda: list(REPORT_HEADER))

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_text(self) -> str:
        return "\n".join(self.header + [c.line() for c in self.checks]) + "\n"

    def write(self, path) -> None:
        atomic_write(path, self.to_text())


def _rel(x: Multivector, ref: Multivector) -> float:
    return (x - ref).norm() / ref.norm()


# -- test signals --------------------------------------------------------------

def band_limited_signal(grid: GridSpec, band: tuple, modes: int, rng: np.random.Generator) -> MultivectorField:
    """Sum of plane waves on DFT bins with |w| in ``band``, random multivector amplitudes."""
    alg = get_algebra(grid.n)
    w = grid.frequencies().reshape(grid.n, -1)
    r = np.linalg.norm(w, axis=0)
    candidates = np.flatnonzero((r >= band[0]) & (r <= band[1]))
    if candidates.size == 0:
        raise ValueError(f"no frequency bins with |w| in {band}")
    picked = rng.choice(candidates, size=min(modes, candidates.size), replace=False)
    x = grid.points()
    data = np.zeros((alg.size,) + grid.shape)
    for idx in picked:
        phase = np.tensordot(w[:, idx], x, axes=1)
        data += np.multiply.outer(rng.standard_normal(alg.size), np.cos(phase))
        data += np.multiply.outer(rng.standard_normal(alg.size), np.sin(phase))
    return MultivectorField(grid, data)


@dataclass(frozen=True)
class GaussianSignal:
    """A Gaussian envelope times a carrier, with a constant multivector amplitude."""

    centre: tuple
    width: float
    carrier: tuple
    amplitude: tuple

    def __call__(self, points: np.ndarray) -> np.ndarray:
        d = points - np.reshape(self.centre, (-1,) + (1,) * (points.ndim - 1))
        env = np.exp(-0.5 * np.sum(d**2, axis=0) / self.width**2)
        wave = np.cos(np.tensordot(np.asarray(self.carrier), d, axes=1))
        return np.multiply.outer(np.asarray(self.amplitude), env * wave)

    def sample(self, grid: GridSpec) -> MultivectorField:
        return MultivectorField.from_function(grid, self)


def gaussian_signals(grid: GridSpec, count: int, rng: np.random.Generator) -> list[GaussianSignal]:
    """Fixed-seed suite; for n=2 amplitudes alternate between even and odd grades."""
    alg = get_algebra(grid.n)
    L = float(grid.lengths.min())
    # two samples per width at least, but narrow enough that the tails are
    # negligible at the box edge (coarse n=3 grids leave a thin window)
    h = float(np.max(grid.spacing))
    w_lo, w_hi = max(0.4, 2.0 * h), max(0.8, 2.15 * h)
    out = []
    for i in range(count):
        amp = rng.standard_normal(alg.size)
        if grid.n == 2:
            amp = np.where(alg.even_mask == (i % 2 == 0), amp, 0.0)
        out.append(GaussianSignal(
            centre=tuple(rng.uniform(-L / 12, L / 12, grid.n)),
            width=float(rng.uniform(w_lo, w_hi)),
            carrier=tuple(rng.uniform(-2.0, 2.0, grid.n)),
            amplitude=tuple(amp),
        ))
    return out


# -- uncertainty ---------------------------------------------------------------

@dataclass
class UncertaintyReport:
    lhs: float
    rhs: float
    ratio: float
    degenerate: bool = False
    details: dict = field(default_factory=dict)


def position_variance(W: WaveletCoefficients) -> float:
    """||b T f||^2 over the group, b measured from the grid centre (minimal image)."""
    spatial = W.grid.spatial
    centre = (np.array(spatial.lower) + np.array(spatial.upper)) / 2
    b = spatial.wrap(spatial.points() - centre.reshape((-1,) + (1,) * spatial.n))
    b2 = np.sum(b**2, axis=0)
    w = W.grid.measure_weights() * spatial.cell_volume
    return sum(w[j, k] * float(np.sum(W.data[j, k] ** 2 * b2)) for j, k, _, _ in W.grid.nodes())


def frequency_pairing(f: MultivectorField) -> Multivector:
    """(w f^, w f^) with the vector w multiplying the spectrum from the left."""
    alg = f.alg
    F = cft_forward(f)
    w = F.grid.frequencies()
    wvec = np.zeros((alg.size,) + f.grid.shape)
    for k in range(f.n):
        wvec[alg.index_of[1 << k]] = w[k]
    wf = MultivectorField(f.grid, alg.product_arrays(wvec, F.data), SPECTRAL)
    return inner_product(wf, wf)


def integrated_variance(W: WaveletCoefficients) -> float:
    """Sum over (a, theta) of d mu times ||w F{T f(a, theta, .)}||^2."""
    spatial = W.grid.spatial
    r2 = np.sum(spatial.frequencies() ** 2, axis=0)
    mu = W.grid.measure_weights()
    total = 0.0
    for j, k, _, _ in W.grid.nodes():
        F = exp_sum(W.data[j, k], spatial, -1, SPATIAL)
        total += mu[j, k] * float(np.sum(r2 * F**2))
    return total * spatial.frequency_cell_volume


def _ratio(lhs: float, rhs: float) -> tuple[float, bool]:
    if rhs == 0.0:
        return float("nan"), True
    return lhs / rhs, False


def check_uncertainty_general(psi: MotherWavelet, f: MultivectorField, grid: GroupGrid,
                              C: AdmissibilityConstant | None = None, W: WaveletCoefficients | None = None,
                              spectrum: str = "auto") -> UncertaintyReport:
    """||b T f||^2  C*(w f^, w f^)  >=  n (2 pi)^n / 4  [C*(f, f)]^2."""
    C = C or admissibility(psi, grid.spatial)
    W = W if W is not None else transform_spectral(psi, f, grid, spectrum)
    n = f.n
    pos = position_variance(W)
    freq = scalar_product(C.value, frequency_pairing(f))
    ff = inner_product(f, f)
    cff = scalar_product(C.value, ff)
    lhs = pos * freq
    rhs = n * (2 * math.pi) ** n / 4 * cff**2
    ratio, degenerate = _ratio(lhs, rhs)
    norm_form = (f * C.c_prime, f)
    details = {
        "position_variance": pos,
        "frequency_term": freq,
        "C_star_ff": cff,
        # ||T f||^2 equals <(f C', f)>_0, which differs from C*(f, f) when C has a vector part
        "coefficient_norm_sq": l2g_norm(W) ** 2,
        "norm_relation_form": inner_product(*norm_form).scalar,
    }
    return UncertaintyReport(lhs, rhs, ratio, degenerate, details)


def check_uncertainty_scalar(psi: MotherWavelet, f: MultivectorField, grid: GroupGrid,
                             C: AdmissibilityConstant | None = None, W: WaveletCoefficients | None = None,
                             spectrum: str = "auto") -> UncertaintyReport:
    """||b T f||^2 ||w f^||^2  >=  n C (2 pi)^n / 4 ||f||^4 for scalar C."""
    C = C or admissibility(psi, grid.spatial)
    if not C.is_scalar:
        raise NonScalarConstant(f"admissibility constant has a vector part: {C.value}")
    W = W if W is not None else transform_spectral(psi, f, grid, spectrum)
    n = f.n
    pos = position_variance(W)
    freq = norm(MultivectorField(f.grid, cft_forward(f).data * np.linalg.norm(f.grid.frequencies(), axis=0), SPECTRAL)) ** 2
    fn2 = norm(f) ** 2
    lhs = pos * freq
    rhs = n * C.value.scalar * (2 * math.pi) ** n / 4 * fn2**2
    ratio, degenerate = _ratio(lhs, rhs)
    return UncertaintyReport(lhs, rhs, ratio, degenerate, {"position_variance": pos, "frequency_term": freq})


def parity_partner(psi: MotherWavelet) -> MotherWavelet:
    """psi e1: same |psi^|, opposite parity for n=2."""
    return psi.right_multiply(get_algebra(psi.n).blade("e1"))


def epsilon_independence(psi: MotherWavelet, f: MultivectorField, grid: GroupGrid, spectrum: str = "auto") -> tuple[float, float]:
    """Integrated frequency variance of T f for psi and its parity partner."""
    v1 = integrated_variance(transform_spectral(psi, f, grid, spectrum))
    v2 = integrated_variance(transform_spectral(parity_partner(psi), f, grid, spectrum))
    return v1, v2


# -- covariance helpers ----------------------------------------------------------

def lattice_map(grid: GridSpec, R: np.ndarray) -> tuple:
    """Index arrays sending sample x to the sample at R x (rotations preserving the lattice)."""
    y = np.tensordot(R, grid.points(), axes=1)
    lower = np.array(grid.lower).reshape((-1,) + (1,) * grid.n)
    step = grid.spacing.reshape((-1,) + (1,) * grid.n)
    k = (y - lower) / step
    kr = np.round(k)
    if np.abs(k - kr).max() > 1e-9:
        raise ValueError("rotation does not map the sampling lattice onto itself")
    return tuple((kr[i].astype(int) % N) for i, N in enumerate(grid.shape))


def quarter_turn(n: int):
    return math.pi / 2 if n == 2 else axis_angle((0.0, 0.0, 1.0), math.pi / 2)


def scale_slices(grid: GroupGrid):
    """One single-scale group grid per scale node, to bound memory for n=3."""
    for a, w in zip(grid.scales, grid.scale_weights):
        yield GroupGrid((a,), (w,), grid.rotations, grid.rotation_weights, grid.spatial, grid.meta)


def rotation_covariance_error(psi, f: MultivectorField, grid: GroupGrid, spectrum: str = "auto") -> float:
    """max | T[f(r0 .)](a, th, b) - T f(a, th', r0 b) | relative, r_th' = r0 r_th."""
    n = f.n
    r0 = quarter_turn(n)
    idx = lattice_map(f.grid, rotation_matrix(r0, n))
    rotated = MultivectorField(f.grid, f.data[(slice(None),) + idx])
    diff, scale = 0.0, 0.0
    for sub in scale_slices(grid):
        lhs = transform_spectral(psi, rotated, sub, spectrum).data
        turned = sub.with_rotations([compose_rotations(r0, th, n) for th in sub.rotations])
        rhs = transform_spectral(psi, f, turned, spectrum).data[(Ellipsis,) + idx]
        diff = max(diff, float(np.abs(lhs - rhs).max()))
        scale = max(scale, float(np.abs(rhs).max()))
    return diff / scale


def translation_covariance_error(psi, f: MultivectorField, grid: GroupGrid, shift, spectrum: str = "auto") -> float:
    axes = tuple(range(3, 3 + f.n))
    moved = f.roll(shift)
    diff, scale = 0.0, 0.0
    for sub in scale_slices(grid):
        lhs = transform_spectral(psi, moved, sub, spectrum).data
        rhs = np.roll(transform_spectral(psi, f, sub, spectrum).data, tuple(shift), axis=axes)
        diff = max(diff, float(np.abs(lhs - rhs).max()))
        scale = max(scale, float(np.abs(rhs).max()))
    return diff / scale


def dilation_covariance_error(psi, signal: GaussianSignal, spatial: GridSpec, grid: GroupGrid, in_band: tuple) -> float:
    """T[f(c .)](a, th, b) against c^(-n/2) T f(c a, th, c b) for node pairs inside ``in_band``."""
    n = spatial.n
    f = signal.sample(spatial)
    scales = grid.scales
    pairs = [(i, j) for i in range(len(scales)) for j in range(i + 1, len(scales))
             if in_band[0] <= scales[i] and scales[j] <= in_band[1]]
    if not pairs:
        # coarse scale grids: the identity is pointwise, so use the window edges
        scales = tuple(in_band)
        pairs = [(0, 1)]
    axes = spatial.axes()
    mid = [N // 2 for N in spatial.shape]
    bs = [tuple(ax[m + d] for ax, m in zip(axes, mid)) for d in (0, 2, -4)]
    worst = 0.0
    for i, j in pairs:
        c = scales[j] / scales[i]
        fc = MultivectorField.from_function(spatial, lambda x: signal(c * x))
        for theta in grid.rotations[:: max(1, len(grid.rotations) // 3)]:
            for b in bs:
                lhs = transform_at(psi, fc, GroupPoint(scales[i], theta, b))
                rhs = transform_at(psi, f, GroupPoint(scales[j], theta, tuple(c * np.array(b)))) * c ** (-n / 2)
                worst = max(worst, _rel(lhs, rhs))
    return worst


def in_band_points(profile: Profile, grid: GroupGrid) -> list[GroupPoint]:
    lo, hi = profile.in_band
    scales = [a for a in grid.scales if lo <= a <= hi] or list(np.linspace(lo, hi, 3))
    rng = profile.rng(11)
    pts = []
    for a in scales:
        for theta in grid.rotations[:: max(1, len(grid.rotations) // 4)]:
            b = tuple(rng.uniform(-1.0, 1.0, profile.n))
            pts.append(GroupPoint(a, theta, b))
    return pts


def daughter_errors(psi: MotherWavelet, spatial: GridSpec, points: list[GroupPoint]) -> tuple[float, float]:
    """Worst relative norm defect and worst spectral mismatch over ``points``."""
    fine = GridSpec.centered(spatial.n, [4 * N for N in spatial.shape], spatial.lengths * 4)
    ref = norm(psi.sample(fine))
    alg = get_algebra(spatial.n)
    w = spatial.frequencies()
    i_n = alg.pseudoscalar().coeffs.reshape((-1,) + (1,) * spatial.n)
    worst_norm, worst_spec = 0.0, 0.0
    for g in points:
        d = daughter(psi, g, spatial)
        worst_norm = max(worst_norm, abs(norm(d) / ref - 1))
        if psi.spectrum is None:
            continue
        expected = daughter_spectrum(psi, g.a, g.theta, spatial, "analytic")
        phase = -np.tensordot(np.array(g.b), w, axes=1)
        rot = np.cos(phase) * expected + np.sin(phase) * alg.product_arrays(expected, np.broadcast_to(i_n, expected.shape))
        got = cft_forward(d).data
        worst_spec = max(worst_spec, float(np.abs(got - rot).max() / np.abs(rot).max()))
    return worst_norm, worst_spec


def kernel_probes(W: WaveletCoefficients, count: int) -> list[tuple]:
    """Largest-|T| position at each of the ``count`` strongest (scale, rotation) nodes."""
    mod = np.sqrt(np.sum(W.data**2, axis=2))
    order = np.argsort(mod.ravel(), kind="stable")[::-1]
    seen, out = set(), []
    for flat in order:
        j, k, *b = np.unravel_index(flat, mod.shape)
        if (j, k) in seen:
            continue
        seen.add((j, k))
        out.append((int(j), int(k), tuple(int(v) for v in b)))
        if len(out) == count:
            break
    return out


def reproducing_errors(W, psi, C, probes, spectrum: str = "auto") -> list[float]:
    points = [W.grid.point(j, k, b) for j, k, b in probes]
    got = reproduce(W, psi, C, points, spectrum)
    return [_rel(r, W.at(j, k, b)) for r, (j, k, b) in zip(got, probes)]


# -- suite -----------------------------------------------------------------------

def run_identity_suite(profile: Profile | None = None, psi: MotherWavelet | None = None, log=None) -> SuiteReport:
    """Run every check for one profile; a failed admissibility stops the suite early."""
    profile = profile or Profile()
    log = log or (lambda msg: None)
    psi = psi or build_mother(profile.mother, profile.n)
    spatial = profile.spatial_grid()
    grid = profile.group_grid()
    n = profile.n
    mode = profile.spectrum
    report = SuiteReport()
    t0 = time.perf_counter()

    def step(msg):
        log(f"[{time.perf_counter() - t0:7.1f}s] {msg}")

    step("admissibility")
    means, tol = zero_mean_residuals(psi.sample(spatial))
    report.add(Check("zero_mean", float(np.abs(means).max()), tol))
    try:
        C = admissibility(psi, spatial)
    except NotAdmissible as exc:
        report.add(Check("admissibility", float("nan"), 0.0, note=str(exc)))
        report.header.append(f"# admissibility failed: {exc}")
        return report
    cn = C.value.norm()
    report.add(Check("admissibility_reverse", _rel(C.value.reverse(), C.value) if cn else math.nan, 1e-12))
    report.add(Check("admissibility_scalar_min", C.value.scalar, 0.0, at_least=True))
    high = sum(C.value.grade(k).norm() ** 2 for k in range(2, n + 1)) ** 0.5
    report.add(Check("admissibility_grades", high / cn, 1e-8))
    report.add(Check("admissibility_inverse", (C.value * C.inverse - 1.0).norm(), 1e-10))
    report.header.append(f"# C = {C.value!r}")

    step("cft")
    rng = profile.rng(1)
    alg = get_algebra(n)
    rand = MultivectorField(spatial, rng.standard_normal((alg.size,) + spatial.shape))
    F = cft_forward(rand)
    report.add(Check("cft_plancherel", abs(norm(F) ** 2 / ((2 * math.pi) ** n * norm(rand) ** 2) - 1), 1e-10))
    report.add(Check("cft_roundtrip", norm(cft_inverse(F) - rand) / norm(rand), 1e-12))
    if n == 2:
        report.add(Check("cft_parity_leakage", cft_parity_behavior_check(rand).max_leakage, 1e-14))

    step("daughters")
    dn, ds = daughter_errors(psi, spatial, in_band_points(profile, grid))
    report.add(Check("daughter_norm", dn, 1e-6))
    if psi.spectrum is not None:
        report.add(Check("daughter_spectrum", ds, 1e-6))

    step("cross-path")
    small = GridSpec.centered(n, profile.cross_path_samples, profile.extent)
    J, K = profile.cross_path_nodes
    small_grid = profile.group_grid(J=J, K=K, spatial=small, scale_range=profile.cross_path_scales)
    fs = MultivectorField(small, rng.standard_normal((alg.size,) + small.shape))
    Wd = transform_direct(psi, fs, small_grid)
    Ws = transform_spectral(psi, fs, small_grid, "sampled")
    report.add(Check("cross_path", float(np.abs(Wd.data - Ws.data).max() / np.abs(Wd.data).max()), 1e-8))

    step("covariance")
    signals = gaussian_signals(spatial, max(profile.suite_signals, 1), profile.rng(2))
    fg = signals[0].sample(spatial)
    shift = tuple(int(v) for v in rng.integers(-5, 6, n))
    report.add(Check("translation_covariance", translation_covariance_error(psi, fg, grid, shift, mode), 1e-8))
    report.add(Check("rotation_covariance", rotation_covariance_error(psi, fg, grid, mode), 1e-8))
    # pointwise and cheap, so sampled twice as finely over the same box
    fine = GridSpec.centered(n, [2 * N for N in spatial.shape], spatial.lengths)
    report.add(Check("dilation_covariance", dilation_covariance_error(psi, signals[0], fine, grid, profile.in_band), 1e-8))

    step("inner product and norm relations")
    f = band_limited_signal(spatial, profile.signal_band, profile.signal_modes, profile.rng(3))
    h = band_limited_signal(spatial, profile.signal_band, profile.signal_modes, profile.rng(4))
    g = f + 0.5 * h
    # one scale at a time so only a single full coefficient set is ever held
    lhs = sum(l2g_inner_product(transform_spectral(psi, f, sub, mode, profile.threads),
                                transform_spectral(psi, g, sub, mode, profile.threads))
              for sub in scale_slices(grid))
    Wf = transform_spectral(psi, f, grid, mode, profile.threads)
    rhs = inner_product(f * C.c_prime, g)
    report.add(Check("inner_product_relation", _rel(lhs, rhs), 0.02))
    nf = l2g_norm(Wf) ** 2
    report.add(Check("norm_relation", abs(nf / inner_product(f * C.c_prime, f).scalar - 1), 0.02))

    step("inversion")
    Ji, Ki = profile.inversion_grid
    inv_grid = profile.group_grid(J=Ji, K=Ki)
    Wi = Wf if inv_grid == grid else transform_spectral(psi, f, inv_grid, mode, profile.threads)
    rec = inverse_transform(Wi, psi, C, mode, profile.threads)
    report.add(Check("inversion", norm(rec - f) / norm(f), 0.05))
    del Wi

    step("reproducing kernel")
    probes = kernel_probes(Wf, profile.probes)
    report.add(Check("reproducing_kernel", max(reproducing_errors(Wf, psi, C, probes, mode)), 0.05))
    g1 = Wf.grid.point(*probes[0])
    g2 = Wf.grid.point(*probes[min(1, len(probes) - 1)])
    k11 = reproducing_kernel(psi, C, g1, g1, spatial)
    report.add(Check("kernel_diagonal_min", k11.scalar, 0.0, at_least=True))
    k12 = reproducing_kernel(psi, C, g1, g2, spatial)
    k21 = reproducing_kernel(psi, C, g2, g1, spatial)
    report.add(Check("kernel_reverse_symmetry", (k12 - k21.reverse()).norm() / k11.norm(), 1e-10))
    del Wf

    step("uncertainty")
    general, scalar, eps = [], [], []
    for s in signals[: profile.suite_signals]:
        fs_ = s.sample(spatial)
        W = transform_spectral(psi, fs_, grid, mode, profile.threads)
        general.append(check_uncertainty_general(psi, fs_, grid, C, W).ratio)
        if C.is_scalar:
            scalar.append(check_uncertainty_scalar(psi, fs_, grid, C, W).ratio)
        if n == 2:
            v1, v2 = epsilon_independence(psi, fs_, grid, mode)
            eps.append(abs(v1 - v2) / v1)
    report.add(Check("uncertainty_general_min", min(general), 1 - 1e-6, at_least=True))
    if scalar:
        report.add(Check("uncertainty_scalar_min", min(scalar), 1 - 1e-6, at_least=True))
    if eps:
        report.add(Check("epsilon_independence", max(eps), 1e-10))
    step("done")
    return report
