"""A positive rotation-invariant weight whose weighted Radon transform kills a nonzero function.

Modules:

* ``radial_core``      the bump, the shell functions f_k and the series f
* ``plane_quadrature`` plane integrals of radial integrands and 2-D oracles
* ``weight_w0``        the far-field weight W0, the dyadic partition, delta0
* ``weight_local``     local weights, the cover and the assembled weight W
* ``radon_transform``  R_W f on planes in R^3 and 2-planes in R^d
* ``verify``           the certification suite
"""

from __future__ import annotations

from .errors import (
    BudgetExceeded,
    ConstructionFailed,
    CoverTooLarge,
    DomainError,
    FrameError,
    NoIntersection,
    NotFound,
    RadonKernelError,
    SignSearchFailed,
)
from .plane_quadrature import PlaneSpec3, PlaneSpecD, QuadratureConfig, integrate_plane_radial
from .radial_core import PHI, BumpSpec, RadialProfile, f_eval, f_k_eval, phi_eval
from .radon_transform import UnitWeight, rwf_plane_d, rwf_reduced
from .weight_local import AssembledWeight, build_assembled_weight
from .weight_w0 import W0Profile, find_delta0

__version__ = "0.1.0"

__all__ = [
    "AssembledWeight",
    "BudgetExceeded",
    "BumpSpec",
    "ConstructionFailed",
    "CoverTooLarge",
    "DomainError",
    "FrameError",
    "NoIntersection",
    "NotFound",
    "PHI",
    "PlaneSpec3",
    "PlaneSpecD",
    "QuadratureConfig",
    "RadialProfile",
    "RadonKernelError",
    "SignSearchFailed",
    "UnitWeight",
    "W0Profile",
    "build_assembled_weight",
    "f_eval",
    "f_k_eval",
    "find_delta0",
    "integrate_plane_radial",
    "phi_eval",
    "rwf_plane_d",
    "rwf_reduced",
]
