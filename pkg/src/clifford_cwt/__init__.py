"""Continuous wavelet transforms of multivector fields on R^2 and R^3.

Signals take values in the Clifford algebra Cl(n,0). The transform runs
over the similitude group of R^n, and a Clifford Fourier transform does
the heavy lifting.
"""

from .clifford_core import Multivector, get_algebra
from .cft import cft_forward, cft_inverse
from .field import GridSpec, MultivectorField, inner_product, norm
from .profile import Profile, build_mother, load_profile
from .simgroup import GroupGrid, GroupPoint, WaveletCoefficients, build_group_grid
from .verify import run_identity_suite
from .wavelet import (
    MotherWavelet,
    NotAdmissible,
    ParityViolation,
    admissibility,
    gabor_mother,
    inverse_transform,
    sampled_mother,
    transform_direct,
    transform_spectral,
)

__all__ = [
    "GridSpec",
    "GroupGrid",
    "GroupPoint",
    "MotherWavelet",
    "Multivector",
    "MultivectorField",
    "NotAdmissible",
    "ParityViolation",
    "Profile",
    "WaveletCoefficients",
    "admissibility",
    "build_group_grid",
    "build_mother",
    "cft_forward",
    "cft_inverse",
    "gabor_mother",
    "get_algebra",
    "inner_product",
    "inverse_transform",
    "load_profile",
    "norm",
    "run_identity_suite",
    "sampled_mother",
    "transform_direct",
    "transform_spectral",
]
