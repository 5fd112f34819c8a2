"""Run profiles: grid, group quadrature, mother wavelet and check settings.

A profile is built from the defaults for its dimension, then overridden by
a config file (JSON or YAML) and finally by command-line flags.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np
import yaml

from . import clwf
from .clifford_core import Multivector, get_algebra
from .field import GridSpec
from .simgroup import GroupGrid, build_group_grid
from .wavelet import MotherWavelet, gabor_mother, sampled_mother


def _default_mother(n: int) -> dict:
    # anisotropic so one scale band covers every orientation densely enough
    # for K=16 while the scale range [0.5, 4] truncates almost nothing
    if n == 2:
        return {"kind": "gabor", "sigma": [2.0, 0.75], "omega0": [4.0, 0.0], "A": [1.0, 0.0, 0.0, 0.0]}
    return {"kind": "gabor", "sigma": [1.5, 1.0, 1.0], "omega0": [3.0, 0.0, 0.0], "A": [1.0] + [0.0] * 7}


@dataclass
class Profile:
    n: int = 2
    samples: int = 64
    extent: float = 12.0
    scales: tuple = (0.5, 4.0, 16)
    rotations: int = 16
    so3: str = "superfibonacci"
    mother: dict = field(default_factory=lambda: _default_mother(2))
    spectrum: str = "auto"
    seed: int = 1234
    threads: int = 1
    # test signals: DFT bins with |w| inside signal_band, random amplitudes
    signal_band: tuple = (1.8, 2.4)
    signal_modes: int = 10
    # scales for which daughters are resolved and not wrapped by the box
    in_band: tuple = (0.6, 0.8)
    inversion_grid: tuple = (32, 32)
    probes: int = 25
    suite_signals: int = 20
    cross_path_samples: int = 16
    cross_path_nodes: tuple = (4, 4)
    cross_path_scales: tuple = (0.5, 1.0)

    @classmethod
    def default(cls, n: int = 2) -> "Profile":
        if n == 2:
            return cls()
        if n == 3:
            # SO(3) quadrature dominates the error, so few scales and many
            # rotations; sized to keep one coefficient set near 1.5 GB
            return cls(
                n=3, samples=32, extent=12.0, scales=(1.0, 4.0, 6), rotations=128, so3="superfibonacci",
                mother=_default_mother(3), signal_band=(1.2, 1.8), in_band=(0.9, 1.0),
                inversion_grid=(6, 128), probes=10, suite_signals=5, cross_path_samples=8,
                cross_path_nodes=(2, 2), cross_path_scales=(1.0, 1.5),
            )
        raise ValueError(f"only n=2 and n=3 are supported, got {n}")

    def spatial_grid(self) -> GridSpec:
        return GridSpec.centered(self.n, self.samples, self.extent)

    def group_grid(self, J: int | None = None, K: int | None = None, spatial: GridSpec | None = None,
                   scale_range: tuple | None = None) -> GroupGrid:
        a_min, a_max, J0 = self.scales
        if scale_range is not None:
            a_min, a_max = scale_range
        K = self.rotations if K is None else K
        so3 = self.so3 if not (self.n == 3 and self.so3 == "octahedral" and K != 24) else "superfibonacci"
        return build_group_grid((a_min, a_max, J or J0), K, spatial or self.spatial_grid(), so3=so3)

    def rng(self, stream: int = 0) -> np.random.Generator:
        return np.random.default_rng([self.seed, stream])

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def validate(self) -> "Profile":
        if self.n not in (2, 3):
            raise ValueError("n must be 2 or 3")
        if self.samples < 2 or self.extent <= 0:
            raise ValueError("grid needs at least 2 samples and a positive extent")
        a_min, a_max, J = self.scales
        if not 0 < a_min < a_max or int(J) < 1:
            raise ValueError("scales must be (a_min, a_max, J) with 0 < a_min < a_max, J >= 1")
        if self.rotations < 1 or self.threads < 1:
            raise ValueError("rotations and threads must be positive")
        if len(self.mother.get("A", [])) not in (0, get_algebra(self.n).size):
            raise ValueError(f"mother amplitude A needs {get_algebra(self.n).size} coefficients")
        return self


_TUPLES = {f.name for f in dataclasses.fields(Profile) if f.type == "tuple"}


def merge(profile: Profile, overrides: dict) -> Profile:
    """Return a copy with ``overrides`` applied; unknown keys are errors."""
    known = {f.name for f in dataclasses.fields(Profile)}
    unknown = set(overrides) - known
    if unknown:
        raise ValueError(f"unknown profile keys: {sorted(unknown)}")
    clean = {}
    for key, value in overrides.items():
        if value is None:
            continue
        if key in _TUPLES:
            value = tuple(value)
        if key == "mother" and value.get("kind", "gabor") == profile.mother.get("kind"):
            # partial overrides of the same kind keep the remaining parameters
            value = {**profile.mother, **value}
        clean[key] = value
    return dataclasses.replace(profile, **clean)


def load_profile(path: str | None = None, overrides: dict | None = None) -> Profile:
    """Defaults, then the config file, then explicit overrides."""
    data = {}
    if path:
        with open(path) as fh:
            data = yaml.safe_load(fh) or {}
        if not isinstance(data, dict):
            raise ValueError(f"{path}: config must be a mapping")
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    n = overrides.get("n", data.get("n", 2))
    profile = Profile.default(int(n))
    profile = merge(profile, data)
    profile = merge(profile, overrides)
    return profile.validate()


def build_mother(spec: dict, n: int) -> MotherWavelet:
    """Mother wavelet from a profile entry: a named builtin or a CLWF field file."""
    kind = spec.get("kind", "gabor")
    if kind == "gabor":
        A = spec.get("A")
        A = None if A is None else Multivector(get_algebra(n), A)
        return gabor_mother(n, spec["sigma"], spec["omega0"], A)
    if kind == "file":
        f, _ = clwf.load(spec["path"])
        if f.n != n:
            raise ValueError(f"mother wavelet file is for n={f.n}, profile has n={n}")
        return sampled_mother(f)
    raise ValueError(f"unknown mother wavelet kind {kind!r}")
