"""The weighted Radon transform of the radial test function.

Every weight here is rotation invariant, so on the plane at offset s the
integrand depends only on r = |x| and the plane integral reduces to
2 pi int_{|s|}^1 W(r, s) f(r) r dr.  ``rwf_plane_d`` instead integrates over an
explicit 2-plane in R^d, evaluating the weight at the ambient points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .plane_quadrature import (
    PlaneSpec3,
    PlaneSpecD,
    QuadratureConfig,
    QuadResult,
    ShellPlaneIntegrals,
    integrate_plane_2d,
    integrate_plane_polar,
    integrate_plane_radial,
    profile_rings,
)
from .radial_core import RadialProfile
from .weight_local import AssembledWeight, LocalWeight
from .weight_w0 import W0Profile

__all__ = ["UnitWeight", "rwf_reduced", "rwf_plane_d", "weighted_integrand", "weight_profile", "zero_scale"]


@dataclass(frozen=True)
class UnitWeight:
    """W = 1; its transform is the plain plane integral G."""

    profile: RadialProfile = RadialProfile(k_max=8)

    def eval_on_plane(self, r, s: float):
        return np.ones(np.shape(r))

    def breakpoints(self, s: float) -> list[float]:
        return []


def weight_profile(w) -> RadialProfile:
    return w.profile


def weighted_integrand(w, s: float, profile: RadialProfile | None = None):
    """r -> W(r, s) f(r) on the plane at offset s."""
    profile = profile or weight_profile(w)
    a = abs(float(s))
    if isinstance(w, W0Profile):
        if a <= 0.5:
            raise DomainError(f"W0 is defined only for |s| > 1/2, got {s}")
        coeffs = w.coefficients(a) if a < 1.0 else {}
        return lambda r: w.eval_on_plane(r, a, coeffs) * profile.f(r)
    if isinstance(w, LocalWeight):
        ratio = float(w.ratio(np.array([a]))[0])
        return lambda r: w.eval_on_plane(r, a, ratio) * profile.f(r)
    if isinstance(w, AssembledWeight):
        xi0, terms = w.terms(a)
        coeffs = w.w0.coefficients(a) if xi0 > 0 and a < 1.0 else {}

        def g(r):
            out = np.zeros(np.shape(r))
            if xi0 > 0:
                out = out + xi0 * w.w0.eval_on_plane(r, a, coeffs)
            for x, lw, ratio in terms:
                out = out + x * lw.eval_on_plane(r, a, ratio)
            return out * profile.f(r)

        return g
    return lambda r: w.eval_on_plane(r, a) * profile.f(r)


def rwf_reduced(s: float, w, cfg: QuadratureConfig | None = None, strict: bool = True) -> QuadResult:
    """R_W f at offset s through the radial reduction."""
    cfg = cfg or QuadratureConfig()
    profile = weight_profile(w)
    a = abs(float(s))
    if a >= profile.outer_radius:
        return QuadResult(0.0, 0.0, 0, 0.0)
    g = weighted_integrand(w, a, profile)
    return integrate_plane_radial(g, a, cfg, profile, breaks=w.breakpoints(a), strict=strict)


def _ambient(w, s: float, profile: RadialProfile):
    g = weighted_integrand(w, s, profile)

    def F(x):
        return g(np.linalg.norm(x, axis=-1))

    return F


def rwf_plane_d(
    plane: PlaneSpecD | PlaneSpec3,
    w,
    cfg: QuadratureConfig | None = None,
    method: str = "polar",
    strict: bool = True,
) -> QuadResult:
    """R_W f over an explicit 2-plane; the weight sees (|x|, dist(plane, 0)).

    ``method`` is "polar" (rho panels x periodic phi rule, any k_max) or
    "tensor" (Cartesian Gauss square, practical only for low k_max).
    """
    cfg = cfg or QuadratureConfig()
    if isinstance(plane, PlaneSpecD):
        # re-validate: the dataclass may have been built with mutated inputs
        PlaneSpecD(plane.p, plane.e1, plane.e2)
    profile = weight_profile(w)
    s = plane.distance
    if s >= profile.outer_radius:
        return QuadResult(0.0, 0.0, 0, 0.0)
    F = _ambient(w, s, profile)
    if method == "polar":
        return integrate_plane_polar(F, plane, cfg, profile, breaks=w.breakpoints(s), strict=strict)
    if method == "tensor":
        rate = 8.0**profile.k_max
        rings = profile_rings(profile, s)
        return integrate_plane_2d(F, plane, cfg, phase_rate=rate, rings=rings, strict=strict)
    raise ValueError(f"unknown method {method!r}")


def zero_scale(profile: RadialProfile, cfg: QuadratureConfig | None = None, n: int = 241) -> float:
    """max_s |G(s)| over s in [0, 1.2]: the reference scale of the zero tests."""
    plane = ShellPlaneIntegrals(profile.bump, cfg or QuadratureConfig())
    s = np.linspace(0.0, 1.2, n)
    # refine near the shells, where G varies fastest
    s = np.union1d(s, 1.0 - np.geomspace(0.5, 2.0 ** -(profile.k_max + 1), 4 * n))
    return float(np.max(np.abs(plane.plane_integral(profile, s, "f"))))

