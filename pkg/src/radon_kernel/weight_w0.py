"""The weight W0 on planes far from the origin.

    W0(r, s) = 1 - G(s) * sum_{k=3}^{k_max} k! f_k(r) psi_{k-2}(|s|) / H_k(s)

for 1/2 < |s| < 1 and W0 = 1 for |s| >= 1.  G is the plane integral of f and
H_k the plane integral of f_k^2.  Because psi_{k-2}(s) != 0 only for planes
passing below shell k, integrating W0 * f over the plane telescopes to
G * (1 - sum_k psi_{k-2}) = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NotFound
from .plane_quadrature import (
    QuadratureConfig,
    ShellPlaneIntegrals,
    g_k_oscillatory,
    h_k_oscillatory,
)
from .radial_core import PHI, BumpSpec, RadialProfile, f_k_eval, phi_derivative_max, shell_bounds, smooth_step

__all__ = [
    "DyadicPartition",
    "psi_k",
    "W0Profile",
    "G_profile",
    "H_k_profile",
    "w0_eval",
    "Delta0Result",
    "find_delta0",
    "c1_constant",
    "k1_index",
    "C2_constant",
    "w0_decay_constant",
    "shell_window",
]


@dataclass(frozen=True)
class DyadicPartition:
    """psi_k(s) = S(tau - k + 1) - S(tau - k), tau = -log2(1 - s), on (1/2, 1).

    Consecutive members share one translate of S, so any partial sum
    telescopes: sum_{k=1}^{n} psi_k = S(tau) - S(tau - n) = 1 - S(tau - n).
    """

    k_max: int = 60

    def tau(self, s):
        s = np.abs(np.asarray(s, dtype=float))
        with np.errstate(divide="ignore"):
            return -np.log2(np.where(s < 1.0, 1.0 - s, np.nan))

    def psi(self, k: int, s):
        s = np.abs(np.asarray(s, dtype=float))
        inside = (s > 0.5) & (s < 1.0)
        t = np.where(inside, self.tau(np.where(inside, s, 0.75)), 0.0)
        out = smooth_step(t - k + 1) - smooth_step(t - k)
        return np.where(inside, out, 0.0)

    def support(self, k: int) -> tuple[float, float]:
        return 1.0 - 2.0 ** (-k + 1), 1.0 - 2.0 ** (-k - 1)

    def partial_sum(self, s, k_lo: int = 1, k_hi: int | None = None):
        k_hi = self.k_max if k_hi is None else k_hi
        s = np.asarray(s, dtype=float)
        return sum((self.psi(k, s) for k in range(k_lo, k_hi + 1)), np.zeros(s.shape))


_PARTITION = DyadicPartition()


def psi_k(k: int, s):
    return _PARTITION.psi(k, s)


def shell_window(k: int) -> tuple[float, float]:
    """Offsets (1 - 2^{-k+3}, 1 - 2^{-k+1}) on which psi_{k-2} can be nonzero."""
    return 1.0 - 2.0 ** (-k + 3), 1.0 - 2.0 ** (-k + 1)


# ---------------------------------------------------------------------------
# constants of the decay estimates


def c1_constant(bump: BumpSpec = PHI) -> float:
    """c1 = (4 pi / 3) max|bump'|."""
    return 4.0 * math.pi / 3.0 * phi_derivative_max(bump)


def _bump_max(bump: BumpSpec) -> float:
    return 1.0  # the plateau value


def k1_index(bump: BumpSpec = PHI, k_limit: int = 200) -> int:
    """Smallest k >= 3 with pi/40 - 2^{-k} (pi/2) max|bump| max|bump'| > 0."""
    m = _bump_max(bump) * phi_derivative_max(bump)
    for k in range(3, k_limit):
        if math.pi / 40.0 - 2.0**-k * math.pi / 2.0 * m > 0:
            return k
    raise NotFound("no k makes the lower bound on H_k positive")


def C2_constant(bump: BumpSpec = PHI) -> float:
    k1 = k1_index(bump)
    return math.pi / 40.0 - 2.0**-k1 * math.pi / 2.0 * _bump_max(bump) * phi_derivative_max(bump)


def w0_decay_constant(bump: BumpSpec = PHI) -> float:
    """C = 2^12 c1^2 c2 with c2 = 1/C2."""
    return 2.0**12 * c1_constant(bump) ** 2 / C2_constant(bump)


# ---------------------------------------------------------------------------
# independent single-offset profiles (u-form)


def G_profile(s: float, cfg: QuadratureConfig | None = None, profile: RadialProfile | None = None) -> tuple[float, float]:
    """Plane integral of f at offset s as sum_k G_k(s)/k!, each G_k in u-form.

    Returns (value, tail_bound) where tail_bound bounds the plane integral of
    the discarded shells k > k_max.
    """
    cfg = cfg or QuadratureConfig()
    profile = profile or RadialProfile(k_max=8)
    a = abs(float(s))
    if a >= 1.0:
        return 0.0, 0.0
    total = 0.0
    for k in profile.shells:
        if shell_bounds(k, profile.bump)[1] <= a:
            continue
        total += g_k_oscillatory(k, a, cfg, profile.bump).value / math.factorial(k)
    return total, profile.plane_tail_bound()


def H_k_profile(k: int, s: float, cfg: QuadratureConfig | None = None, bump: BumpSpec = PHI):
    """Plane integral of f_k^2 at offset s with its (mean, oscillating) split."""
    return h_k_oscillatory(k, s, cfg, bump)


# ---------------------------------------------------------------------------
# W0


@dataclass
class W0Profile:
    """W0 as a function of (|x|, x.theta).

    ``psi_shift`` replaces psi_{k-2} by psi_{k-2+psi_shift}; any nonzero shift
    breaks the telescoping and is only used as a negative control.
    """

    profile: RadialProfile = field(default_factory=lambda: RadialProfile(k_max=8))
    cfg: QuadratureConfig = field(default_factory=QuadratureConfig)
    psi_shift: int = 0
    partition: DyadicPartition = field(default_factory=DyadicPartition)

    def __post_init__(self):
        self.plane = ShellPlaneIntegrals(self.profile.bump, self.cfg)
        self.n_calls = 0
        self._spline = None

    @property
    def k_max(self) -> int:
        return self.profile.k_max

    @property
    def terms(self) -> range:
        return range(3, self.profile.k_max + 1)

    def psi_index(self, k: int) -> int:
        return k - 2 + self.psi_shift

    # profiles -------------------------------------------------------------

    def G(self, s):
        """Plane integral of f, freshly integrated (exact cumulative panels)."""
        s = np.abs(np.asarray(s, dtype=float))
        if self.cfg.interpolate_profiles:
            return self._interp_G(s)
        return self.plane.plane_integral(self.profile, s, "f")

    def _interp_G(self, s):
        # plotting only: cubic spline on a grid fine enough for the top shell
        from scipy.interpolate import CubicSpline

        if self._spline is None:
            n = int(min(4e6, 16 * 8.0**self.k_max * 2))
            grid = np.linspace(0.0, 1.0, n)
            self._spline = CubicSpline(grid, self.plane.plane_integral(self.profile, grid, "f"))
        return np.where(s < 1.0, self._spline(np.minimum(s, 1.0)), 0.0)

    def H(self, k: int, s):
        s = np.abs(np.asarray(s, dtype=float))
        return self.plane.tails(k, s, "f2_mean") + self.plane.tails(k, s, "f2_osc")

    def H_full(self, k: int) -> float:
        return self.plane.full(k, "f2_mean") + self.plane.full(k, "f2_osc")

    def coefficients(self, s: float) -> dict[int, float]:
        """c_k(s) = G(s) k! psi(s) / H_k(s) for the (at most two) active k."""
        a = abs(float(s))
        if a <= 0.5:
            raise DomainError(f"W0 is defined only for |s| > 1/2, got {s}")
        if a >= 1.0:
            return {}
        active = []
        for k in self.terms:
            p = float(self.partition.psi(self.psi_index(k), a))
            if p != 0.0:
                active.append((k, p))
        if not active:
            return {}
        g = float(self.G(np.array([a]))[0])
        out = {}
        for k, p in active:
            h = float(self.H(k, np.array([a]))[0])
            out[k] = g * math.factorial(k) * p / h
        return out

    def coefficient_table(self, s) -> tuple[np.ndarray, np.ndarray]:
        """Vectorised coefficients: (ks, C) with C[i, j] = c_{ks[j]}(s_i)."""
        s = np.abs(np.asarray(s, dtype=float))
        ks = np.array(list(self.terms))
        C = np.zeros((s.size, ks.size))
        inside = (s > 0.5) & (s < 1.0)
        if not inside.any():
            return ks, C
        g = self.G(s[inside])
        for j, k in enumerate(ks):
            p = self.partition.psi(self.psi_index(int(k)), s[inside])
            nz = p != 0
            if not nz.any():
                continue
            h = self.H(int(k), s[inside][nz])
            col = np.zeros(p.shape)
            col[nz] = g[nz] * math.factorial(int(k)) * p[nz] / h
            C[np.flatnonzero(inside)[nz], j] = col[nz]
        return ks, C

    def sup_deviation(self, s) -> np.ndarray:
        """sup_r |1 - W0(r, s)| = max_k |c_k(s)|.

        On each shell k >= 3 the plateau carries a full period of
        cos(8^k r^2), so f_k attains +1 and -1 and the supremum over r of
        |c_k f_k(r)| is |c_k|; shells are disjoint so only one term is
        active at any r.
        """
        _, C = self.coefficient_table(s)
        return np.abs(C).max(axis=1) if C.shape[1] else np.zeros(C.shape[0])

    # evaluation ----------------------------------------------------------

    def __call__(self, r, s):
        return self.eval_on_plane(r, s)

    def eval_on_plane(self, r, s: float, coeffs: dict[int, float] | None = None):
        """W0(r, s) for an array of radii on one plane."""
        self.n_calls += 1
        r = np.asarray(r, dtype=float)
        a = abs(float(s))
        if a <= 0.5:
            raise DomainError(f"W0 is defined only for |s| > 1/2, got {s}")
        if np.any(r < a - 1e-12):
            raise DomainError("point not on the plane: r < |s|")
        if a >= 1.0:
            return np.ones(r.shape)
        coeffs = self.coefficients(a) if coeffs is None else coeffs
        out = np.ones(r.shape)
        for k, c in coeffs.items():
            if k <= self.profile.k_max:
                out = out - c * f_k_eval(k, r, self.profile.bump)
        return out

    def breakpoints(self, s: float) -> list[float]:
        return []

    def to_dict(self) -> dict:
        return {"profile": self.profile.to_dict(), "psi_shift": self.psi_shift}


def w0_eval(r, s: float, w0: W0Profile | None = None):
    w0 = w0 or W0Profile()
    return w0.eval_on_plane(r, s)


# ---------------------------------------------------------------------------
# delta_0


@dataclass(frozen=True)
class Delta0Result:
    delta0: float
    # largest grid value of sup_r |1 - W0| on (delta0, grid_end]
    max_deviation_beyond: float
    grid_points: int
    grid_end: float
    # shell index J from which the analytic bound takes over
    tail_shell: int
    tail_bound: float
    margin: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _offset_grid(lo: float, hi: float, k_max: int, bump: BumpSpec, per_radian: float, base: int = 400) -> np.ndarray:
    """Grid on [lo, hi] resolving the phase of G (rate 2 * 8^j * s in shell j)."""
    pieces = []
    edges = [lo]
    for j in range(1, k_max + 2):
        r_in = shell_bounds(j, bump)[0]
        if lo < r_in < hi:
            edges.append(r_in)
    edges.append(hi)
    for a, b in zip(edges[:-1], edges[1:]):
        j = _shell_at_or_above(0.5 * (a + b), bump)
        j = min(j, k_max)
        n = int(math.ceil(per_radian * 8.0**j * (b * b - a * a))) + base
        pieces.append(np.linspace(a, b, n + 1)[:-1])
    pieces.append(np.array([hi]))
    return np.concatenate(pieces)


def _shell_at_or_above(s: float, bump: BumpSpec) -> int:
    j = 1
    while shell_bounds(j, bump)[1] <= s:
        j += 1
    return j


def _tail_bound(w0: W0Profile, J: int) -> float:
    """Bound on sup_r |1 - W0(r, s)| for all s >= inner radius of shell J.

    |G(s)| <= sum_{m >= J} 3 pi / (8^m m!) by one integration by parts per
    shell (bump <= 1, total variation <= 2); psi <= 1; H_k(s) = H_k(full)
    wherever psi_{k-2}(s) != 0.  Only k with psi_{k-2} not identically zero
    beyond r_in(J) contribute.
    """
    bump = w0.profile.bump
    r_in = shell_bounds(J, bump)[0]
    gb = sum(3.0 * math.pi / (8.0**m * math.factorial(m)) for m in range(J, w0.profile.k_max + 1))
    best = 0.0
    for k in w0.terms:
        lo, hi = w0.partition.support(w0.psi_index(k))
        if hi <= r_in:
            continue
        best = max(best, math.factorial(k) / w0.H_full(k))
    return gb * best


def find_delta0(
    w0: W0Profile | None = None,
    per_radian: float = 8.0,
    margin: float = 0.02,
    bound_target: float = 0.25,
) -> Delta0Result:
    """Smallest grid-certified delta0 with W0 >= 1/2 on |s| > delta0.

    The deviation sup_r |1 - W0| is evaluated exactly in r and on a grid in
    s that resolves G's phase; the grid is refined twice over and the larger
    value kept.  A grid point counts as good if its deviation is below
    (1 - margin)/2.  Beyond the inner radius of the first shell J whose
    analytic tail bound is below ``bound_target`` the grid stops; beyond
    1 - 2^{-k_max+1} all terms vanish and W0 = 1 identically.
    """
    w0 = w0 or W0Profile()
    bump = w0.profile.bump
    K = w0.profile.k_max
    # psi_{K-2} is the last partition member used; it vanishes beyond this offset
    s_end = w0.partition.support(K - 2 + w0.psi_shift)[1]
    J = None
    tb = math.inf
    for j in range(1, K + 1):
        b = _tail_bound(w0, j)
        if b < bound_target:
            J, tb = j, b
            break
    grid_end = s_end if J is None else min(s_end, max(shell_bounds(J, bump)[0], 0.5))
    if J is None:
        J, tb = K + 1, 0.0
    lo = 0.5 + 1e-9
    g1 = _offset_grid(lo, grid_end, K, bump, per_radian)
    g2 = _offset_grid(lo, grid_end, K, bump, 2 * per_radian)
    grid = np.unique(np.concatenate([g1, g2]))
    # contiguous chunks keep the cumulative tail integrals small in memory
    dev = np.concatenate([w0.sup_deviation(c) for c in np.array_split(grid, max(1, grid.size // 200_000))])
    bad = dev > 0.5 * (1.0 - margin)
    if not bad.any():
        delta0 = 0.5
    else:
        i = int(np.flatnonzero(bad)[-1])
        if i + 1 >= grid.size:
            raise NotFound("W0 >= 1/2 not certified anywhere below the grid end; raise k_max")
        delta0 = float(grid[i + 1])
    if delta0 >= 1.0:
        raise NotFound("no delta0 < 1")
    beyond = dev[grid > delta0]
    return Delta0Result(
        delta0=delta0,
        max_deviation_beyond=float(beyond.max()) if beyond.size else 0.0,
        grid_points=int(grid.size),
        grid_end=float(grid_end),
        tail_shell=int(J),
        tail_bound=float(tb),
        margin=margin,
    )
