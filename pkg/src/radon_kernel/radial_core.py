"""Radial building blocks: the smooth bump, the shell functions and the series f.

Everything here is a pure function of immutable value objects.  Radii are
plain floats or numpy arrays; the spherical symmetry of f is structural, so
the profile is only ever evaluated at ``r = |x|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar

__all__ = [
    "BumpSpec",
    "PHI",
    "RadialProfile",
    "smooth_step",
    "smooth_step_derivative",
    "phi_eval",
    "phi_derivative_max",
    "shell_bounds",
    "shell_of_radius",
    "f_k_eval",
    "f_eval",
    "line_shell_index",
]


def _h(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def smooth_step(x):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1, h(x)/(h(x)+h(1-x)) between.

    With h(x) = exp(-1/x) for x > 0.  Symmetric: step(x) + step(1-x) == 1.
    """
    # "+ 0.0" turns -0.0 into +0.0, so -1/x is never +inf
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0) + 0.0
    # exp(-1/0) = 0, so the endpoints need no special casing
    with np.errstate(divide="ignore"):
        a = np.exp(-1.0 / x)
        b = np.exp(-1.0 / (1.0 - x))
    return a / (a + b)


def smooth_step_derivative(x):
    x = np.asarray(x, dtype=float)
    inside = (x > 0) & (x < 1)
    xc = np.where(inside, x, 0.5)
    a = _h(xc)
    b = _h(1.0 - xc)
    da = a / xc**2
    db = b / (1.0 - xc) ** 2
    return np.where(inside, (da * b + a * db) / (a + b) ** 2, 0.0)


@dataclass(frozen=True)
class BumpSpec:
    """Piecewise smooth bump: 0, smooth rise, plateau of 1, smooth fall, 0."""

    rise_start: float
    rise_end: float
    fall_start: float
    fall_end: float

    def __post_init__(self):
        vals = (self.rise_start, self.rise_end, self.fall_start, self.fall_end)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"non-finite bump knots {vals}")
        if not (self.rise_start < self.rise_end <= self.fall_start < self.fall_end):
            raise ValueError(f"bump knots out of order: {vals}")

    @property
    def knots(self) -> tuple[float, float, float, float]:
        return (self.rise_start, self.rise_end, self.fall_start, self.fall_end)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        rise = smooth_step((t - self.rise_start) / (self.rise_end - self.rise_start))
        fall = smooth_step((self.fall_end - t) / (self.fall_end - self.fall_start))
        return np.where(t <= self.fall_start, rise, fall)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        wr = self.rise_end - self.rise_start
        wf = self.fall_end - self.fall_start
        rise = smooth_step_derivative((t - self.rise_start) / wr) / wr
        fall = -smooth_step_derivative((self.fall_end - t) / wf) / wf
        return np.where(t <= self.fall_start, rise, fall)

    def to_dict(self) -> dict:
        return {
            "rise_start": self.rise_start,
            "rise_end": self.rise_end,
            "fall_start": self.fall_start,
            "fall_end": self.fall_end,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BumpSpec":
        return cls(d["rise_start"], d["rise_end"], d["fall_start"], d["fall_end"])


# supp = [4/5, 6/5], plateau [9/10, 11/10]
PHI = BumpSpec(0.8, 0.9, 1.1, 1.2)


def phi_eval(t, bump: BumpSpec = PHI):
    return bump(t)


@lru_cache(maxsize=32)
def phi_derivative_max(bump: BumpSpec = PHI, n_samples: int = 20001) -> float:
    """max_t |bump'(t)|: dense scan over the support, then golden-section polish."""
    ts = np.linspace(bump.rise_start, bump.fall_end, n_samples)
    vals = np.abs(bump.derivative(ts))
    i = int(np.argmax(vals))
    lo = ts[max(i - 1, 0)]
    hi = ts[min(i + 1, n_samples - 1)]
    best = float(vals[i])
    if 0 < i < n_samples - 1:
        res = minimize_scalar(
            lambda t: -abs(float(bump.derivative(t))),
            bracket=(lo, ts[i], hi),
            method="golden",
            options={"xtol": 1e-12},
        )
        best = max(best, -float(res.fun))
    return best


def shell_bounds(k: int, bump: BumpSpec = PHI) -> tuple[float, float]:
    """Open radial interval (inner, outer) on which the k-th shell function lives."""
    if k < 1:
        raise ValueError(f"shell index must be >= 1, got {k}")
    scale = 2.0 ** (-k)
    return 1.0 - bump.fall_end * scale, 1.0 - bump.rise_start * scale


def shell_knots(k: int, bump: BumpSpec = PHI) -> list[float]:
    """Radii where the envelope bump(2^k (1-r)) changes piece, increasing."""
    scale = 2.0 ** (-k)
    return sorted(1.0 - t * scale for t in bump.knots)


def shell_of_radius(r: float, bump: BumpSpec = PHI) -> int | None:
    """Index k with r inside the open shell k, or None."""
    if not (0.0 < r < 1.0):
        return None
    rho = 1.0 - r
    # admissible k lie in (log2(rise_start/rho), log2(fall_end/rho)); that interval
    # is shorter than 1 so at most one integer qualifies
    k = max(1, math.floor(math.log2(bump.rise_start / rho)) + 1)
    for cand in (k - 1, k, k + 1):
        if cand >= 1 and bump.rise_start < 2.0**cand * rho < bump.fall_end:
            return cand
    return None


def shell_index_array(r, bump: BumpSpec = PHI) -> np.ndarray:
    """Vectorised shell_of_radius; 0 marks 'no shell'."""
    r = np.asarray(r, dtype=float)
    rho = np.where((r > 0) & (r < 1), 1.0 - r, np.nan)
    with np.errstate(invalid="ignore", divide="ignore"):
        k = np.floor(np.log2(bump.rise_start / rho)) + 1
    k = np.where(np.isfinite(k), np.maximum(k, 1), 0).astype(np.int64)
    out = np.zeros(r.shape, dtype=np.int64)
    for shift in (-1, 0, 1):
        cand = k + shift
        with np.errstate(invalid="ignore", over="ignore"):
            t = np.ldexp(rho, cand)
            ok = (cand >= 1) & (t > bump.rise_start) & (t < bump.fall_end) & (out == 0)
        out = np.where(ok, cand, out)
    return out


def f_k_eval(k: int, r, bump: BumpSpec = PHI):
    """Shell function bump(2^k (1-r)) * cos(8^k r^2)."""
    r = np.asarray(r, dtype=float)
    return bump(2.0**k * (1.0 - r)) * np.cos(8.0**k * r * r)


def f_eval(r, k_max: int = 10, bump: BumpSpec = PHI):
    """Truncated series sum_{k<=k_max} f_k(r)/k!; at most one term is nonzero."""
    r = np.asarray(r, dtype=float)
    ks = shell_index_array(r, bump)
    out = np.zeros(r.shape, dtype=float)
    for k in np.unique(ks):
        if k == 0 or k > k_max:
            continue
        m = ks == k
        out[m] = f_k_eval(int(k), r[m], bump) / math.factorial(int(k))
    return out


def line_shell_index(x0_norm: float, bump: BumpSpec = PHI) -> int:
    """Smallest k >= 3 whose shell is crossed by every line at distance x0_norm.

    Equivalent to max(3, ceil(log2(fall_end / (1 - |x0|)))) with the strict
    inequality |x0| < inner radius enforced.
    """
    if not 0.0 <= x0_norm < 1.0:
        raise ValueError("line must meet the open unit ball")
    k = max(3, math.ceil(math.log2(bump.fall_end / (1.0 - x0_norm))))
    while x0_norm >= shell_bounds(k, bump)[0]:
        k += 1
    return k


@dataclass(frozen=True)
class RadialProfile:
    """The radial function f(r) = sum_{k=1}^{k_max} f_k(r)/k! and its shells."""

    bump: BumpSpec = PHI
    k_max: int = 10

    def __post_init__(self):
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")
        if self.bump.fall_end >= 2.0 * self.bump.rise_start:
            # shells would overlap
            raise ValueError("bump support too wide for disjoint shells")

    @property
    def shells(self) -> range:
        return range(1, self.k_max + 1)

    def shell_bounds(self, k: int) -> tuple[float, float]:
        return shell_bounds(k, self.bump)

    def shell_knots(self, k: int) -> list[float]:
        return shell_knots(k, self.bump)

    def shell_of_radius(self, r: float) -> int | None:
        k = shell_of_radius(r, self.bump)
        return k if k is not None and k <= self.k_max else None

    def f_k(self, k: int, r):
        return f_k_eval(k, r, self.bump)

    def f(self, r):
        return f_eval(r, self.k_max, self.bump)

    def __call__(self, r):
        return self.f(r)

    @property
    def outer_radius(self) -> float:
        """Supremum of the support of the truncated series."""
        return self.shell_bounds(self.k_max)[1]

    def breakpoints(self) -> list[float]:
        pts = []
        for k in self.shells:
            pts.extend(self.shell_knots(k))
        return sorted(pts)

    def tail_bound(self) -> float:
        """Sup-norm of the dropped terms sum_{k>k_max} f_k/k!.

        Shells are disjoint, so this is 1/(k_max+1)!.
        """
        return 1.0 / math.factorial(self.k_max + 1)

    def plane_tail_bound(self) -> float:
        """Bound on the plane integral of the dropped terms, from
        |G_k| <= 4^-k pi max|bump'| summed over k > k_max."""
        m = self.k_max + 1
        return (4.0 * math.pi / 3.0) * phi_derivative_max(self.bump) * 4.0**-m / math.factorial(m)

    def to_dict(self) -> dict:
        return {"bump": self.bump.to_dict(), "k_max": self.k_max}

    @classmethod
    def from_dict(cls, d: dict) -> "RadialProfile":
        return cls(BumpSpec.from_dict(d["bump"]), int(d["k_max"]))
