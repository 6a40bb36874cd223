"""Plane integrals of rotation-invariant integrands.

Three independent discretisations of the same plane integral live here:

* the r-form   2 pi int_{|s|}^1 g(r) r dr               (``integrate_plane_radial``)
* the u-form   pi s^2 int_{Lambda} g(|s| sqrt(u)) du     (``g_k_oscillatory``, ``h_k_oscillatory``)
* the v-form   pi int_{s^2}^1 g(sqrt(v)) dv, evaluated for many offsets at
  once by exact cumulative panel sums                     (``ShellPlaneIntegrals``)

plus a Cartesian tensor Gauss-Legendre oracle over the plane itself
(``integrate_plane_2d``) that knows nothing about radial symmetry.

Oscillation is handled by panelling: the phase 8^k r^2 of every shell is known
in closed form, so panels are sized to a fixed phase advance and each panel
gets a fixed-order Gauss rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import BudgetExceeded, FrameError
from .radial_core import PHI, BumpSpec, RadialProfile, shell_bounds, shell_index_array

__all__ = [
    "QuadratureConfig",
    "QuadResult",
    "PlaneSpec3",
    "PlaneSpecD",
    "integrate_plane_radial",
    "g_k_oscillatory",
    "h_k_oscillatory",
    "ShellPlaneIntegrals",
    "integrate_plane_2d",
    "integrate_plane_polar",
    "random_plane_d",
    "plane_from_offset",
    "plane_manifold_dimension",
]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureConfig:
    target_rel_tol: float = 1e-9
    max_evals: int = 60_000_000
    points_per_oscillation: int = 12
    gauss_order: int = 16
    mc_samples: int = 10_000
    rng_seed: int = 20170301
    # 2-D oracle
    oracle_rel_tol: float = 1e-6
    oracle_gauss_order: int = 16
    # every smooth piece (between bump knots) gets at least this many panels
    min_panels_per_piece: int = 8
    max_panel_width: float = 0.02
    # memoised + cubic-interpolated profiles; never used for certification
    interpolate_profiles: bool = False

    def __post_init__(self):
        if not self.target_rel_tol > 0:
            raise ValueError("target_rel_tol must be positive")
        if self.points_per_oscillation < 4:
            raise ValueError("points_per_oscillation must be >= 4")
        if self.gauss_order < 2 or self.gauss_order % 2:
            raise ValueError("gauss_order must be an even integer >= 2")

    @property
    def phase_per_panel(self) -> float:
        """Phase advance allowed in one 1-D Gauss panel."""
        return self.points_per_oscillation / self.gauss_order * math.pi

    @property
    def oracle_phase_per_panel(self) -> float:
        """Phase advance per 2-D panel: ``points_per_oscillation`` nodes per period."""
        return 2.0 * math.pi * self.oracle_gauss_order / self.points_per_oscillation

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    n_evals: int
    # integral of |integrand|; the natural scale for cancellation-heavy integrals
    scale: float

    def __float__(self) -> float:
        return self.value

    @property
    def converged_at(self) -> float:
        """Relative error with respect to ``scale``."""
        return self.error / self.scale if self.scale > 0 else 0.0


@lru_cache(maxsize=16)
def gauss_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(order)
    return x, w


def _split_uniform(x0: float, x1: float, n: int) -> np.ndarray:
    return np.linspace(x0, x1, n + 1)


def subdivide(pts: np.ndarray, counts: np.ndarray) -> np.ndarray:
    """Split each [pts[i], pts[i+1]] into counts[i] equal parts; returns all edges."""
    pts = np.asarray(pts, dtype=float)
    counts = np.asarray(counts, dtype=np.int64)
    idx = np.repeat(np.arange(counts.size), counts)
    j = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    starts = pts[:-1]
    widths = np.diff(pts)
    edges = starts[idx] + widths[idx] * (j / counts[idx])
    return np.append(edges, pts[-1])


def _split_quadratic(x0: float, x1: float, n: int) -> np.ndarray:
    """Edges equally spaced in x^2, i.e. equal advance of a phase c*x^2."""
    e = np.sqrt(np.linspace(x0 * x0, x1 * x1, n + 1))
    e[0], e[-1] = x0, x1
    return e


_CHUNK_NODES = 2_000_000
# minimum number of rho panels between consecutive weight breakpoints
_PANELS_PER_BREAK_PIECE = 16


def _finish(edges: np.ndarray, func, cfg: QuadratureConfig, weight_fn=None, phase: float = 0.0) -> QuadResult:
    """Composite Gauss on consecutive edges, with a half-order error estimate.

    ``phase`` bounds the largest cosine argument; its rounding (about
    phase * eps per node, roughly independent between nodes) enters the floor.
    """
    edges = np.asarray(edges, dtype=float)
    if edges.size < 2:
        return QuadResult(0.0, 0.0, 0, 0.0)
    n = cfg.gauss_order
    mid = 0.5 * (edges[1:] + edges[:-1])
    hw = 0.5 * (edges[1:] - edges[:-1])
    keep = hw > 0
    mid, hw = mid[keep], hw[keep]
    n_evals = mid.size * (n + n // 2)
    if n_evals > cfg.max_evals:
        raise BudgetExceeded(
            f"needs {n_evals} evaluations, budget {cfg.max_evals}", n_evals=n_evals
        )
    results = []
    # panels are processed in chunks so memory stays bounded for the top shells
    step = max(1, _CHUNK_NODES // n)
    for order in (n, n // 2):
        x, w = gauss_rule(order)
        q_parts, l1_parts = [], []
        for i in range(0, mid.size, step):
            m, h = mid[i : i + step], hw[i : i + step]
            nodes = m[:, None] + h[:, None] * x[None, :]
            vals = np.asarray(func(nodes.ravel()), dtype=float).reshape(nodes.shape)
            if weight_fn is not None:
                vals = vals * weight_fn(nodes)
            contrib = vals * (w[None, :] * h[:, None])
            q_parts.append(float(np.sum(contrib)))
            l1_parts.append(float(np.sum(np.abs(contrib))))
        results.append((math.fsum(q_parts), math.fsum(l1_parts)))
    (q, l1), (q_half, _) = results
    # rounding floor: summation plus node-position noise amplified by the phase
    floor = l1 * _EPS * (16.0 + 4.0 * math.sqrt(mid.size) + 4.0 * phase / math.sqrt(mid.size * n))
    err = abs(q - q_half) + floor
    return QuadResult(q, err, n_evals, l1)


def _check(res: QuadResult, tol: float, what: str) -> QuadResult:
    if res.error > tol * max(res.scale, abs(res.value)) and res.error > 1e-300:
        raise BudgetExceeded(
            f"{what}: error {res.error:.3e} above tolerance {tol:.1e} x scale {res.scale:.3e}",
            value=res.value,
            error=res.error,
            n_evals=res.n_evals,
        )
    return res


# ---------------------------------------------------------------------------
# r-form


def radial_edges(
    a: float,
    b: float,
    cfg: QuadratureConfig,
    profile: RadialProfile | None = None,
    harmonic: float = 1.0,
    breaks=(),
) -> np.ndarray:
    """Panel edges on [a, b] split at every shell knot and extra break.

    Inside shell k the edges are equally spaced in r^2 so that the phase
    harmonic*8^k r^2 advances at most ``cfg.phase_per_panel`` per panel.
    """
    if b <= a:
        return np.array([a])
    pts = {a, b}
    if profile is not None:
        pts.update(p for p in profile.breakpoints() if a < p < b)
    pts.update(float(p) for p in breaks if a < p < b)
    pts = sorted(pts)
    cap = cfg.phase_per_panel
    chunks = []
    for x0, x1 in zip(pts[:-1], pts[1:]):
        k = 0
        if profile is not None:
            k = int(shell_index_array(np.array([0.5 * (x0 + x1)]), profile.bump)[0])
            if k > profile.k_max:
                k = 0
        if k:
            omega = harmonic * 8.0**k
            n = math.ceil(omega * (x1 * x1 - x0 * x0) / cap)
            n = max(n, cfg.min_panels_per_piece)
            e = _split_quadratic(x0, x1, n)
        else:
            n = max(math.ceil((x1 - x0) / cfg.max_panel_width), cfg.min_panels_per_piece)
            e = _split_uniform(x0, x1, n)
        chunks.append(e[:-1])
    chunks.append(np.array([b]))
    return np.concatenate(chunks)


def integrate_plane_radial(
    g,
    s: float,
    cfg: QuadratureConfig | None = None,
    profile: RadialProfile | None = None,
    harmonic: float = 1.0,
    breaks=(),
    r_max: float = 1.0,
    strict: bool = True,
) -> QuadResult:
    """Integral of x -> g(|x|) over the plane at signed offset ``s``.

    Reduces to 2 pi int_{|s|}^{r_max} g(r) r dr; ``g`` must vanish beyond
    ``r_max``.  ``profile`` supplies shell knots and oscillation frequencies
    for panelling; ``harmonic`` scales the frequency (2 for squared shells).

    The panels are laid out in r but the rule runs in the in-plane radius
    rho = sqrt(r^2 - s^2), where 2 pi r dr = 2 pi rho d rho.  Functions of rho
    (the local bumps) stay smooth there, while in r they pick up a square
    root at r = |s|.  Equal steps in r^2 are equal steps in rho^2, so the
    phase per panel is unchanged.
    """
    cfg = cfg or QuadratureConfig()
    a = abs(float(s))
    if a >= r_max:
        return QuadResult(0.0, 0.0, 0, 0.0)
    edges = radial_edges(a, r_max, cfg, profile, harmonic, breaks)
    rho_edges = np.sqrt(np.maximum(edges * edges - a * a, 0.0))
    rho_edges[0] = 0.0
    a2 = a * a
    if len(breaks):
        # the weight's bumps live between these knots; resolve each piece in rho
        knots = sorted({0.0, *(math.sqrt(max(p * p - a2, 0.0)) for p in breaks if a < p < r_max), rho_edges[-1]})
        extra = [np.linspace(x0, x1, _PANELS_PER_BREAK_PIECE + 1) for x0, x1 in zip(knots[:-1], knots[1:])]
        rho_edges = np.unique(np.concatenate([rho_edges, *extra]))
    phase = harmonic * 8.0**profile.k_max * r_max * r_max if profile is not None else 0.0
    res = _finish(
        rho_edges,
        lambda rho: g(np.sqrt(a2 + rho * rho)),
        cfg,
        weight_fn=lambda rho: 2.0 * math.pi * rho,
        phase=phase,
    )
    return _check(res, cfg.target_rel_tol, "integrate_plane_radial") if strict else res


# ---------------------------------------------------------------------------
# u-form (one shell at a time)


def _lambda_edges(k: int, a: float, cfg: QuadratureConfig, bump: BumpSpec, harmonic: float):
    """Edges in u for the shell-k integrand on the plane at |s| = a."""
    r_in, r_out = shell_bounds(k, bump)
    if a >= r_out:
        return None
    u_lo = max(1.0, (r_in / a) ** 2)
    u_hi = (r_out / a) ** 2
    pts = {u_lo, u_hi}
    for t in bump.knots:
        u = ((1.0 - t * 2.0**-k) / a) ** 2
        if u_lo < u < u_hi:
            pts.add(u)
    pts = sorted(pts)
    omega = harmonic * 8.0**k * a * a
    cap = cfg.phase_per_panel
    chunks = []
    for x0, x1 in zip(pts[:-1], pts[1:]):
        n = max(math.ceil(omega * (x1 - x0) / cap), cfg.min_panels_per_piece)
        chunks.append(_split_uniform(x0, x1, n)[:-1])
    chunks.append(np.array([u_hi]))
    return np.concatenate(chunks)


def g_k_oscillatory(
    k: int,
    s: float,
    cfg: QuadratureConfig | None = None,
    bump: BumpSpec = PHI,
    strict: bool = True,
) -> QuadResult:
    """Plane integral of the k-th shell function at offset ``s``, u-variable form.

    G_k(s) = pi s^2 int_{Lambda_{k,|s|}} bump(2^k(1-|s| sqrt u)) cos(8^k s^2 u) du.
    """
    cfg = cfg or QuadratureConfig()
    a = abs(float(s))
    if a <= 0:
        raise ValueError("u-form needs s != 0")
    edges = _lambda_edges(k, a, cfg, bump, 1.0)
    if edges is None:
        return QuadResult(0.0, 0.0, 0, 0.0)
    sk, a2 = 2.0**k, a * a
    om = 8.0**k * a2

    def integrand(u):
        return math.pi * a2 * bump(sk * (1.0 - a * np.sqrt(u))) * np.cos(om * u)

    res = _finish(edges, integrand, cfg, phase=om * edges[-1])
    return _check(res, cfg.target_rel_tol, f"G_{k}") if strict else res


@dataclass(frozen=True)
class HSplit:
    total: QuadResult
    mean_part: QuadResult  # (pi s^2/2) int bump^2 du
    oscillating_part: QuadResult  # (pi s^2/2) int bump^2 cos(2 8^k s^2 u) du

    @property
    def value(self) -> float:
        return self.total.value


def h_k_oscillatory(
    k: int,
    s: float,
    cfg: QuadratureConfig | None = None,
    bump: BumpSpec = PHI,
    strict: bool = True,
) -> HSplit:
    """Plane integral of f_k^2 at offset ``s`` via cos^2 = (1 + cos 2x)/2."""
    cfg = cfg or QuadratureConfig()
    a = abs(float(s))
    if a <= 0:
        raise ValueError("u-form needs s != 0")
    edges = _lambda_edges(k, a, cfg, bump, 2.0)
    if edges is None:
        z = QuadResult(0.0, 0.0, 0, 0.0)
        return HSplit(z, z, z)
    sk, a2 = 2.0**k, a * a
    om = 2.0 * 8.0**k * a2

    def mean(u):
        return 0.5 * math.pi * a2 * bump(sk * (1.0 - a * np.sqrt(u))) ** 2

    def osc(u):
        return 0.5 * math.pi * a2 * bump(sk * (1.0 - a * np.sqrt(u))) ** 2 * np.cos(om * u)

    h1 = _finish(edges, mean, cfg)
    h2 = _finish(edges, osc, cfg, phase=om * edges[-1])
    total = QuadResult(h1.value + h2.value, h1.error + h2.error, h1.n_evals + h2.n_evals, h1.scale + h2.scale)
    if strict:
        _check(total, cfg.target_rel_tol, f"H_{k}")
    return HSplit(total, h1, h2)


# ---------------------------------------------------------------------------
# v-form: many offsets at once


class ShellPlaneIntegrals:
    """Exact plane integrals of shell functions for arbitrary batches of offsets.

    For a sorted batch of offsets inside shell k the tails
    int_{s_j^2}^{r_out^2} (...) dv are obtained by integrating every gap between
    consecutive s_j^2 with fresh Gauss panels and accumulating from the top.
    No interpolation is involved; the full-shell value (plane below the shell)
    is a constant and is computed once per (k, kind).
    """

    KINDS = ("f", "f2_mean", "f2_osc")

    def __init__(self, bump: BumpSpec = PHI, cfg: QuadratureConfig | None = None):
        self.bump = bump
        self.cfg = cfg or QuadratureConfig()
        self._full: dict[tuple[int, str], float] = {}

    def _integrand(self, k: int, kind: str):
        bump = self.bump
        sk, om = 2.0**k, 8.0**k
        if kind == "f":
            return lambda v: math.pi * bump(sk * (1.0 - np.sqrt(v))) * np.cos(om * v), 1.0
        if kind == "f2_mean":
            return lambda v: 0.5 * math.pi * bump(sk * (1.0 - np.sqrt(v))) ** 2, 2.0
        if kind == "f2_osc":
            return lambda v: 0.5 * math.pi * bump(sk * (1.0 - np.sqrt(v))) ** 2 * np.cos(2.0 * om * v), 2.0
        raise ValueError(kind)

    def _edges(self, k: int, lo: float, hi: float, harmonic: float, cuts) -> np.ndarray:
        """Edges in v on [lo, hi] containing every v in ``cuts`` as an edge."""
        cfg = self.cfg
        pts = {lo, hi}
        for t in self.bump.knots:
            v = (1.0 - t * 2.0**-k) ** 2
            if lo < v < hi:
                pts.add(v)
        cuts = np.asarray(cuts, dtype=float)
        pts = np.union1d(np.array(sorted(pts)), cuts[(cuts > lo) & (cuts < hi)])
        omega = harmonic * 8.0**k
        cap = cfg.phase_per_panel
        width = hi - lo
        d = np.diff(pts)
        n = np.ceil(omega * d / cap)
        # pieces between bump knots get the minimum panel count pro rata
        n = np.maximum(n, np.ceil(cfg.min_panels_per_piece * 4 * d / width))
        n = np.maximum(n, 1).astype(np.int64)
        return subdivide(pts, n)

    def full(self, k: int, kind: str = "f") -> float:
        key = (k, kind)
        if key not in self._full:
            r_in, r_out = shell_bounds(k, self.bump)
            func, harm = self._integrand(k, kind)
            edges = self._edges(k, r_in * r_in, r_out * r_out, harm, ())
            self._full[key] = _finish(edges, func, self.cfg, phase=harm * 8.0**k * r_out * r_out).value
        return self._full[key]

    def tails(self, k: int, s, kind: str = "f") -> np.ndarray:
        """Plane integral over the part of shell k outside radius |s|, for each s."""
        s = np.abs(np.asarray(s, dtype=float))
        out = np.zeros(s.shape)
        r_in, r_out = shell_bounds(k, self.bump)
        below = s <= r_in
        if below.any():
            out[below] = self.full(k, kind)
        inside = (s > r_in) & (s < r_out)
        if inside.any():
            v = np.unique(s[inside] ** 2)
            func, harm = self._integrand(k, kind)
            edges = self._edges(k, v[0], r_out * r_out, harm, v)
            x, w = gauss_rule(self.cfg.gauss_order)
            mid = 0.5 * (edges[1:] + edges[:-1])
            hw = 0.5 * (edges[1:] - edges[:-1])
            nodes = mid[:, None] + hw[:, None] * x[None, :]
            panel = np.sum(func(nodes.ravel()).reshape(nodes.shape) * w[None, :], axis=1) * hw
            # tail from each edge to the top, accumulated from the top down
            tail_from_edge = np.concatenate([np.cumsum(panel[::-1])[::-1], [0.0]])
            idx = np.searchsorted(edges, v)
            tail_v = tail_from_edge[idx]
            out[inside] = tail_v[np.searchsorted(v, s[inside] ** 2)]
        return out

    def plane_integral(self, profile: RadialProfile, s, kind: str = "f") -> np.ndarray:
        """sum_k c_k * tails(k, s) with c_k = 1/k! for f and 1/k!^2 for f^2 parts."""
        s = np.asarray(s, dtype=float)
        out = np.zeros(s.shape)
        for k in profile.shells:
            c = 1.0 / math.factorial(k)
            if kind != "f":
                c = c * c
            out += c * self.tails(k, s, kind)
        return out


# ---------------------------------------------------------------------------
# Planes and the 2-D oracle


@dataclass(frozen=True)
class PlaneSpec3:
    """Oriented plane {x in R^3 : x . theta = s}."""

    s: float
    theta: tuple[float, float, float]

    def __post_init__(self):
        th = np.asarray(self.theta, dtype=float)
        if th.shape != (3,) or abs(np.linalg.norm(th) - 1.0) > 1e-12:
            raise FrameError("theta must be a unit 3-vector")

    def frame(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Foot point and an orthonormal basis (e1, e2) with (e1, e2, theta) positive."""
        th = np.asarray(self.theta, dtype=float)
        helper = np.eye(3)[int(np.argmin(np.abs(th)))]
        e1 = np.cross(helper, th)
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(th, e1)
        return self.s * th, e1, e2

    @property
    def distance(self) -> float:
        return abs(self.s)


@dataclass(frozen=True)
class PlaneSpecD:
    """Two-dimensional plane p + span(e1, e2) in R^d with p orthogonal to the span."""

    p: tuple[float, ...]
    e1: tuple[float, ...]
    e2: tuple[float, ...]

    def __post_init__(self):
        p, e1, e2 = (np.asarray(v, dtype=float) for v in (self.p, self.e1, self.e2))
        d = p.size
        if d < 3 or e1.size != d or e2.size != d:
            raise FrameError("p, e1, e2 must be d-vectors with d >= 3")
        checks = [
            abs(e1 @ e1 - 1.0),
            abs(e2 @ e2 - 1.0),
            abs(e1 @ e2),
            abs(p @ e1),
            abs(p @ e2),
        ]
        if max(checks) > 1e-10:
            raise FrameError(f"frame not orthonormal (defect {max(checks):.2e})")

    @property
    def d(self) -> int:
        return len(self.p)

    @property
    def distance(self) -> float:
        return float(np.linalg.norm(self.p))

    def frame(self):
        return (np.asarray(self.p, float), np.asarray(self.e1, float), np.asarray(self.e2, float))

    def reversed(self) -> "PlaneSpecD":
        """Same plane with the opposite orientation."""
        return PlaneSpecD(self.p, self.e2, self.e1)


def random_plane_d(d: int, offset: float, rng: np.random.Generator) -> PlaneSpecD:
    """Random 2-plane at distance ``offset``: Gaussian Stiefel frame + orthogonal offset."""
    g = rng.standard_normal((d, 3))
    q, r = np.linalg.qr(g)
    q = q * np.sign(np.diag(r))[None, :]
    e1, e2, n = q[:, 0], q[:, 1], q[:, 2]
    return PlaneSpecD(tuple(offset * n), tuple(e1), tuple(e2))


def plane_from_offset(s: float, d: int = 3) -> PlaneSpec3 | PlaneSpecD:
    if d == 3:
        return PlaneSpec3(float(s), (0.0, 0.0, 1.0))
    e = np.eye(d)
    return PlaneSpecD(tuple(abs(s) * e[2]), tuple(e[0]), tuple(e[1]))


def plane_manifold_dimension(d: int, rng: np.random.Generator) -> int:
    """Dimension of the oriented 2-planes in R^d by counting at a random point.

    Variables: frame (e1, e2) and offset p, 3d numbers.  Constraints: 3 for
    orthonormality and 2 for p orthogonal to the frame; their Jacobian rank is
    measured.  One more degree of freedom is a rotation of the frame inside the
    plane, which does not move the plane.
    """
    plane = random_plane_d(d, 0.5, rng)
    p, e1, e2 = plane.frame()
    z = np.zeros(d)
    rows = [
        np.concatenate([2 * e1, z, z]),
        np.concatenate([z, 2 * e2, z]),
        np.concatenate([e2, e1, z]),
        np.concatenate([p, z, e1]),
        np.concatenate([z, p, e2]),
    ]
    jac = np.array(rows)
    n_constraints = int(np.linalg.matrix_rank(jac))
    # in-plane rotation: tangent (e2, -e1, 0) must satisfy the constraints
    gauge = np.concatenate([e2, -e1, z])
    assert np.allclose(jac @ gauge, 0.0, atol=1e-12)
    return 3 * d - n_constraints - 1


def _axis_edges(half_width: float, omega: float, cap: float, max_width: float) -> np.ndarray:
    """Symmetric panel edges on [-L, L]; width <= cap / (2 omega |u|) and <= max_width."""
    edges = [0.0]
    u = 0.0
    while u < half_width:
        w = max_width
        if omega > 0:
            # phase omega*u^2 advances by about 2*omega*u_far*w over the panel
            w_phase = cap / (2.0 * omega * (u + max_width))
            w = min(w, w_phase)
            # tighten once more with the actual far end
            w = min(w, cap / (2.0 * omega * (u + w)) if u + w > 0 else w)
        u = min(u + w, half_width)
        edges.append(u)
    pos = np.array(edges)
    return np.concatenate([-pos[:0:-1], pos])


def integrate_plane_2d(
    F,
    plane: PlaneSpec3 | PlaneSpecD,
    cfg: QuadratureConfig | None = None,
    phase_rate: float = 0.0,
    max_width: float = 0.005,
    rings=None,
    half_width: float = 1.1,
    strict: bool = True,
    chunk_cells: int = 4000,
    plane_coords: bool = False,
) -> QuadResult:
    """Tensor Gauss-Legendre integral of an ambient function over a 2-plane.

    ``F`` maps an (n, d) array of ambient points to n values; it is sampled at
    p + u1 e1 + u2 e2 for (u1, u2) in [-half_width, half_width]^2.  With
    ``plane_coords`` it is called as F(u1, u2) on the plane coordinates instead.  Panels
    along each axis are sized for a quadratic phase ``phase_rate * |u|^2`` and
    capped at ``max_width``.  ``rings`` is an optional list of in-plane radius
    intervals outside of which F is known to vanish; cells not meeting any ring
    are skipped.
    """
    cfg = cfg or QuadratureConfig()
    p, e1, e2 = plane.frame()
    edges = _axis_edges(half_width, phase_rate, cfg.oracle_phase_per_panel, max_width)
    lo, hi = edges[:-1], edges[1:]
    # min / max distance of each 1-D panel from 0
    dmin = np.where((lo < 0) & (hi > 0), 0.0, np.minimum(np.abs(lo), np.abs(hi)))
    dmax = np.maximum(np.abs(lo), np.abs(hi))
    rmin = np.sqrt(dmin[:, None] ** 2 + dmin[None, :] ** 2)
    rmax = np.sqrt(dmax[:, None] ** 2 + dmax[None, :] ** 2)
    if rings is None:
        mask = np.ones(rmin.shape, dtype=bool)
    else:
        mask = np.zeros(rmin.shape, dtype=bool)
        for a, b in rings:
            mask |= (rmax > a) & (rmin < b)
    ii, jj = np.nonzero(mask)
    n = cfg.oracle_gauss_order
    n_evals = ii.size * (n * n + (n // 2) ** 2)
    if n_evals > cfg.max_evals:
        raise BudgetExceeded(f"2-D oracle needs {n_evals} evaluations", n_evals=n_evals)
    mid = 0.5 * (lo + hi)
    hw = 0.5 * (hi - lo)
    totals = []
    for order in (n, n // 2):
        x, w = gauss_rule(order)
        acc, acc_abs = [], []
        for start in range(0, ii.size, chunk_cells):
            ci = ii[start : start + chunk_cells]
            cj = jj[start : start + chunk_cells]
            u1 = mid[ci, None] + hw[ci, None] * x[None, :]  # (c, n)
            u2 = mid[cj, None] + hw[cj, None] * x[None, :]
            U1 = np.repeat(u1, order, axis=1)  # (c, n*n) varying slowest
            U2 = np.tile(u2, (1, order))
            if plane_coords:
                vals = np.asarray(F(U1.ravel(), U2.ravel()), dtype=float).reshape(U1.shape)
            else:
                pts = p[None, None, :] + U1[..., None] * e1 + U2[..., None] * e2
                vals = np.asarray(F(pts.reshape(-1, p.size)), dtype=float).reshape(U1.shape)
            wt = np.outer(w, w).ravel()[None, :] * (hw[ci] * hw[cj])[:, None]
            contrib = vals * wt
            acc.append(np.sum(contrib))
            acc_abs.append(np.sum(np.abs(contrib)))
        totals.append((float(np.sum(acc)), float(np.sum(acc_abs))))
    (q, l1), (q_half, _) = totals
    err = abs(q - q_half) + l1 * _EPS * (16.0 + 4.0 * math.sqrt(max(ii.size, 1)))
    res = QuadResult(q, err, n_evals, l1)
    return _check(res, cfg.oracle_rel_tol, "integrate_plane_2d") if strict else res


def integrate_plane_polar(
    F,
    plane: PlaneSpec3 | PlaneSpecD,
    cfg: QuadratureConfig | None = None,
    profile: RadialProfile | None = None,
    breaks=(),
    n_phi: int = 6,
    strict: bool = True,
    chunk_points: int = 200_000,
) -> QuadResult:
    """Polar Gauss x trapezoid integral of an ambient function over a 2-plane.

    ``F`` is sampled at p + rho (cos phi e1 + sin phi e2).  The rho panels are
    the radial panels of ``integrate_plane_radial`` pulled back through
    rho = sqrt(r^2 - |p|^2), so each panel sees a bounded phase advance; phi
    uses the periodic trapezoid rule with ``n_phi`` nodes.  The error estimate
    combines a half-order rho rule and a half-count phi rule.
    """
    cfg = cfg or QuadratureConfig()
    p, e1, e2 = plane.frame()
    a = float(np.linalg.norm(p))
    if a >= 1.0:
        return QuadResult(0.0, 0.0, 0, 0.0)
    r_edges = radial_edges(a, 1.0, cfg, profile, 1.0, breaks)
    edges = np.sqrt(np.maximum(r_edges * r_edges - a * a, 0.0))
    edges[0] = 0.0
    mid = 0.5 * (edges[1:] + edges[:-1])
    hw = 0.5 * (edges[1:] - edges[:-1])
    keep = hw > 0
    mid, hw = mid[keep], hw[keep]
    n = cfg.gauss_order
    if n_phi < 2 or n_phi % 2:
        raise ValueError("n_phi must be an even integer >= 2")
    n_evals = mid.size * (n + n // 2) * n_phi
    if n_evals > cfg.max_evals:
        raise BudgetExceeded(f"polar oracle needs {n_evals} evaluations", n_evals=n_evals)

    phis = 2.0 * math.pi * np.arange(n_phi) / n_phi
    dirs = np.cos(phis)[:, None] * e1[None, :] + np.sin(phis)[:, None] * e2[None, :]

    def ring_sums(order: int) -> tuple[np.ndarray, np.ndarray]:
        """Panel contributions with the full and the every-other-node phi rule."""
        x, w = gauss_rule(order)
        rho = (mid[:, None] + hw[:, None] * x[None, :]).ravel()
        wr = 2.0 * math.pi * ((hw[:, None] * w[None, :]).ravel()) * rho
        step = max(1, chunk_points // n_phi)
        full = np.empty(rho.size)
        half = np.empty(rho.size)
        for start in range(0, rho.size, step):
            rr = rho[start : start + step]
            pts = p[None, None, :] + rr[:, None, None] * dirs[None, :, :]
            vals = np.asarray(F(pts.reshape(-1, p.size)), dtype=float).reshape(rr.size, n_phi)
            full[start : start + step] = vals.mean(axis=1)
            half[start : start + step] = vals[:, ::2].mean(axis=1)
        return full * wr, half * wr

    full, half_phi = ring_sums(n)
    half_rho, _ = ring_sums(n // 2)
    q = float(np.sum(full))
    l1 = float(np.sum(np.abs(full)))
    err = abs(q - float(np.sum(half_rho))) + abs(q - float(np.sum(half_phi)))
    err += l1 * _EPS * (16.0 + 4.0 * math.sqrt(mid.size))
    res = QuadResult(q, err, n_evals, l1)
    return _check(res, cfg.oracle_rel_tol, "integrate_plane_polar") if strict else res


def profile_rings(profile: RadialProfile, s: float, extra=()) -> list[tuple[float, float]]:
    """In-plane radius intervals where the shells of ``profile`` meet the plane at offset s."""
    out = []
    a2 = s * s
    for k in profile.shells:
        r_in, r_out = profile.shell_bounds(k)
        if r_out <= abs(s):
            continue
        out.append((math.sqrt(max(r_in * r_in - a2, 0.0)), math.sqrt(r_out * r_out - a2)))
    out.extend(extra)
    return out


def radial_ambient(g):
    """Wrap a radial function r -> g(r) as an ambient-point function."""

    def F(x):
        return g(np.linalg.norm(x, axis=-1))

    return F
