"""Local weights near the origin, the cover of [-delta0, delta0], and the assembled W.

A local weight centred at offset s0 is

    W_i(r, s) = 1 - psi1(rho) * m0(s) / n0(s),    rho = sqrt(r^2 - s^2),

with m0(s) the plane integral of f and n0(s) the plane integral of
f * psi1(rho).  Integrating W_i * f over the plane gives m0 - m0 = 0 for every
s where n0 does not vanish.  psi1 sits on a half-period of the oscillation of
f where f has the sign opposite to m0(s0), so W_i >= 1 on the plane at s0
and W_i >= 1/2 on a window around it.

The assembled weight is W = xi_0 W0 + sum_i xi_i W_i with a partition of
unity xi subordinate to the windows.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConstructionFailed, CoverTooLarge, DomainError, SignSearchFailed
from .plane_quadrature import QuadratureConfig, ShellPlaneIntegrals, gauss_rule
from .radial_core import BumpSpec, RadialProfile, shell_bounds, smooth_step
from .weight_w0 import Delta0Result, W0Profile, find_delta0

__all__ = [
    "LocalWeight",
    "LocalWeightSettings",
    "build_local_weight",
    "CoverPartition",
    "build_cover",
    "AssembledWeight",
    "build_assembled_weight",
    "assembled_w_eval",
    "SCHEMA_VERSION",
]

SCHEMA_VERSION = "1"


@dataclass(frozen=True)
class LocalWeightSettings:
    eps_start: float = 0.05
    eps_min: float = 1e-6
    # |n0(s)| must stay above this fraction of |n0(s0)| on the window
    denominator_floor: float = 0.25
    # the signed ratio m0/n0 must stay below this on the check grid (W >= 1 - bound)
    ratio_bound: float = 0.4
    # check-grid density per radian of the fastest phase, and minimum size
    grid_per_radian: float = 16.0
    grid_min: int = 200
    # Gauss panels over the support of psi1 for n0
    n0_panels: int = 16
    # psi1 placement: pieces tried per shell, number of shells tried
    candidates_per_shell: int = 2
    candidate_shells: int = 2

    def to_dict(self) -> dict:
        return dict(self.__dict__)


class PlaneProfiles:
    """Shared numerator profile m0(s) = plane integral of f."""

    def __init__(self, profile: RadialProfile, cfg: QuadratureConfig):
        self.profile = profile
        self.cfg = cfg
        self.plane = ShellPlaneIntegrals(profile.bump, cfg)

    def m0(self, s):
        return self.plane.plane_integral(self.profile, np.abs(np.asarray(s, dtype=float)), "f")


@dataclass
class LocalWeight:
    s0: float
    eps: float
    psi1: BumpSpec
    k_star: int
    r_star: float
    m0_s0: float
    n0_s0: float
    profile: RadialProfile
    n0_panels: int = 16
    profiles: PlaneProfiles | None = field(default=None, repr=False)

    def __post_init__(self):
        self.n_calls = 0
        self.n_outside = 0
        x, w = gauss_rule(16)
        lo, mid, hi = self.psi1.rise_start, self.psi1.rise_end, self.psi1.fall_end
        half = self.n0_panels // 2
        edges = np.concatenate([np.linspace(lo, mid, half + 1)[:-1], np.linspace(mid, hi, half + 1)])
        c = 0.5 * (edges[1:] + edges[:-1])
        h = 0.5 * (edges[1:] - edges[:-1])
        rho = (c[:, None] + h[:, None] * x[None, :]).ravel()
        # 2 pi rho psi1(rho) d rho
        self._rho = rho
        self._trig = None
        self._wq = (2.0 * math.pi * (h[:, None] * w[None, :]).ravel()) * rho * self.psi1(rho)

    @property
    def window(self) -> tuple[float, float]:
        return self.s0 - self.eps, self.s0 + self.eps

    def contains(self, s) -> np.ndarray:
        a = np.abs(np.asarray(s, dtype=float))
        return (a > self.s0 - self.eps) & (a < self.s0 + self.eps)

    def n0(self, s) -> np.ndarray:
        """Plane integral of f(sqrt(s^2 + rho^2)) psi1(rho) at each offset."""
        s = np.abs(np.asarray(s, dtype=float))
        if s.size == 0:
            return np.zeros(s.shape)
        k = self.k_star
        bump = self.profile.bump
        r_lo = math.sqrt(s.min() ** 2 + self._rho[0] ** 2)
        r_hi = math.sqrt(s.max() ** 2 + self._rho[-1] ** 2)
        p_lo = 1.0 - bump.fall_start * 2.0**-k
        p_hi = 1.0 - bump.rise_end * 2.0**-k
        if p_lo <= r_lo and r_hi <= p_hi:
            # envelope is 1 on every node: cos(w(s^2 + rho^2)) splits into
            # fixed rho-sums times cos / sin of w s^2
            if self._trig is None:
                ph = 8.0**k * self._rho**2
                c = math.factorial(k)
                self._trig = (np.sum(self._wq * np.cos(ph)) / c, np.sum(self._wq * np.sin(ph)) / c)
            a, b = self._trig
            ps = 8.0**k * s * s
            return a * np.cos(ps) - b * np.sin(ps)
        r = np.sqrt(s[..., None] ** 2 + self._rho**2)
        r_in, r_out = self.profile.shell_bounds(self.k_star)
        if r_in < r.min() and r.max() < r_out:
            # every node inside the shell of psi1: skip the shell lookup
            vals = self.profile.f_k(self.k_star, r) / math.factorial(self.k_star)
        else:
            vals = self.profile.f(r)
        return np.sum(vals * self._wq, axis=-1)

    def m0(self, s) -> np.ndarray:
        return self.profiles.m0(s)

    def ratio(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore"):
            return self.m0(s) / self.n0(s)

    def eval_on_plane(self, r, s: float, ratio: float | None = None):
        """W_i(r, s) for radii r on the plane at offset s."""
        self.n_calls += 1
        if not self.contains(s):
            self.n_outside += 1
        r = np.asarray(r, dtype=float)
        if np.any(r < abs(s) - 1e-12):
            raise DomainError("point not on the plane: r < |s|")
        if ratio is None:
            ratio = float(self.ratio(np.array([s]))[0])
        rho = np.sqrt(np.maximum(r * r - s * s, 0.0))
        return 1.0 - self.psi1(rho) * ratio

    def breakpoints(self, s: float) -> list[float]:
        return [math.sqrt(s * s + p * p) for p in self.psi1.knots]

    def to_dict(self) -> dict:
        return {
            "s0": self.s0,
            "eps": self.eps,
            "psi1": self.psi1.to_dict(),
            "k_star": self.k_star,
            "r_star": self.r_star,
            "m0_s0": self.m0_s0,
            "n0_s0": self.n0_s0,
            "n0_panels": self.n0_panels,
        }

    @classmethod
    def from_dict(cls, d: dict, profile: RadialProfile, profiles: PlaneProfiles) -> "LocalWeight":
        return cls(
            s0=d["s0"],
            eps=d["eps"],
            psi1=BumpSpec.from_dict(d["psi1"]),
            k_star=d["k_star"],
            r_star=d["r_star"],
            m0_s0=d["m0_s0"],
            n0_s0=d["n0_s0"],
            profile=profile,
            n0_panels=d.get("n0_panels", 32),
            profiles=profiles,
        )


def _sign_pieces(k: int, s0: float, want_sign: int, bump: BumpSpec):
    """Radius intervals of shell k above s0 on which f_k has sign ``want_sign``.

    Each piece is a half-period of cos(8^k r^2) clipped to the open support
    of the shell; yields (r_lo, r_hi, r_centre) in increasing radius, the
    centre being the phase midpoint.
    """
    r_in, r_out = shell_bounds(k, bump)
    lo = max(r_in, s0)
    if lo >= r_out:
        return
    om = 8.0**k
    m = math.floor(om * lo * lo / math.pi - 0.5)
    while True:
        a = max((m - 0.5) * math.pi / om, lo * lo)
        b = min((m + 0.5) * math.pi / om, r_out * r_out)
        if a >= r_out * r_out:
            return
        sign = 1 if m % 2 == 0 else -1
        if b > a and sign == want_sign:
            yield math.sqrt(a), math.sqrt(b), math.sqrt(0.5 * (a + b))
        m += 1


def _candidates(s0: float, m0_s0: float, profile: RadialProfile, n_shells: int, per_shell: int):
    """Candidate bumps psi1 (in rho) on constant-sign pieces of f above s0.

    Pieces shorter than a fifth of a half-period (clipped at a shell edge) are
    skipped; the lowest ``n_shells`` shells that offer a piece are used.
    """
    want = -1 if m0_s0 > 0 else 1
    shells_used = 0
    for k in profile.shells:
        found = 0
        full = math.pi / 8.0**k
        for ra, rb, rc in _sign_pieces(k, s0, want, profile.bump):
            if rb * rb - ra * ra < 0.2 * full:
                continue
            # keep pieces that reach the upper half of the envelope
            env = profile.bump(2.0**k * (1.0 - np.linspace(ra, rb, 9)))
            if env.max() < 0.5:
                continue
            rho_lo = math.sqrt(max(ra * ra - s0 * s0, 0.0))
            rho_c = math.sqrt(rc * rc - s0 * s0)
            rho_hi = math.sqrt(rb * rb - s0 * s0)
            if not rho_lo < rho_c < rho_hi:
                continue
            yield k, rc, BumpSpec(rho_lo, rho_c, rho_c, rho_hi)
            found += 1
            if found >= per_shell:
                break
        if found:
            shells_used += 1
            if shells_used >= n_shells:
                return


def _grid_size(length: float, rate: float, settings: LocalWeightSettings, minimum: int | None = None) -> int:
    minimum = settings.grid_min if minimum is None else minimum
    return max(minimum, int(math.ceil(length * rate * settings.grid_per_radian)))


def _phase_rate(s_hi: float, k_star: int, profile: RadialProfile) -> float:
    """Fastest phase rate in s of m0 and n0 on offsets up to s_hi."""
    j = 1
    while j < profile.k_max and profile.shell_bounds(j)[1] <= s_hi:
        j += 1
    return 2.0 * 8.0 ** max(j, k_star) * max(s_hi, 1e-3)


def _failures(lw: LocalWeight, s, settings: LocalWeightSettings, chunk: int = 4096) -> np.ndarray:
    """Boolean mask of offsets where the window checks fail."""
    bad = np.zeros(s.shape, dtype=bool)
    sign = math.copysign(1.0, lw.n0_s0)
    for a in range(0, s.size, chunk):
        ss = s[a : a + chunk]
        n0 = lw.n0(ss)
        b = n0 * sign < settings.denominator_floor * abs(lw.n0_s0)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = lw.m0(ss) / n0
        bad[a : a + chunk] = b | ~(ratio <= settings.ratio_bound)
    return bad


def _window_ok(lw: LocalWeight, eps: float, settings: LocalWeightSettings) -> bool:
    lo, hi = max(0.0, lw.s0 - eps), lw.s0 + eps
    n = _grid_size(hi - lo, _phase_rate(hi, lw.k_star, lw.profile), settings)
    return not _failures(lw, np.linspace(lo, hi, n + 1), settings).any()


def _failure_distance(lw: LocalWeight, reach: float, settings: LocalWeightSettings) -> float:
    """Distance from s0 to the nearest failing offset, searched in doubling rings up to ``reach``."""
    s0 = lw.s0
    inner = 0.0
    step = min(reach, 1.0 / _phase_rate(s0 + reach, lw.k_star, lw.profile))
    outer = step
    while True:
        rate = _phase_rate(s0 + outer, lw.k_star, lw.profile)
        n = _grid_size(outer - inner, rate, settings, minimum=32)
        d = np.linspace(inner, outer, n + 1)
        right = s0 + d
        left = s0 - d
        keep = left >= 0.0
        s = np.concatenate([right, left[keep]])
        dist = np.concatenate([d, d[keep]])
        bad = _failures(lw, s, settings)
        if bad.any():
            return float(dist[bad].min())
        if outer >= reach:
            return math.inf
        inner, outer = outer, min(2.0 * outer, reach)


def build_local_weight(
    s0: float,
    delta0: float,
    profile: RadialProfile,
    cfg: QuadratureConfig | None = None,
    settings: LocalWeightSettings | None = None,
    profiles: PlaneProfiles | None = None,
) -> LocalWeight:
    """Local weight centred at s0 with the widest window passing the checks.

    psi1 is placed on a piece of the plane where f has the sign opposite to
    m0(s0); several pieces in the lowest shells above s0 are tried.  Candidate
    half-widths are eps_start * 2^-j (eps_start capped so the window stays
    below (1 + delta0)/2).  A window is accepted when, on a dense grid over it,
    n0 keeps its sign with |n0| >= floor * |n0(s0)| and the signed ratio m0/n0
    stays below ``ratio_bound``.
    """
    cfg = cfg or QuadratureConfig()
    settings = settings or LocalWeightSettings()
    profiles = profiles or PlaneProfiles(profile, cfg)
    s0 = abs(float(s0))
    m0_s0 = float(profiles.m0(np.array([s0]))[0])
    eps_cap = min(settings.eps_start, 0.5 * (1.0 + delta0) - s0)
    best = None
    n_tried = 0
    for k_star, r_star, psi1 in _candidates(s0, m0_s0, profile, settings.candidate_shells, settings.candidates_per_shell):
        n_tried += 1
        # n0 slides through a half-period of f once the phase 8^k s^2 moves by pi,
        # so a higher shell cannot beat a window already this wide
        if best is not None and k_star > best.k_star and best.eps >= math.pi / (2.0 * 8.0**k_star * max(s0, 1e-9)):
            break
        lw = LocalWeight(s0, 0.0, psi1, k_star, r_star, m0_s0, 0.0, profile, settings.n0_panels, profiles)
        n0_s0 = float(lw.n0(np.array([s0]))[0])
        if n0_s0 == 0.0 or (m0_s0 != 0.0 and math.copysign(1, m0_s0) == math.copysign(1, n0_s0)):
            continue
        lw.n0_s0 = n0_s0
        eps = eps_cap
        d_fail = _failure_distance(lw, eps, settings)
        while eps >= d_fail:
            eps *= 0.5
        if best is not None and eps <= best.eps:
            continue
        while eps >= settings.eps_min and (best is None or eps > best.eps):
            if _window_ok(lw, eps, settings):
                lw.eps = eps
                best = lw
                break
            eps *= 0.5
    if n_tried == 0:
        raise SignSearchFailed(f"f has no piece of the required sign above s0={s0}")
    if best is None:
        raise ConstructionFailed(f"window at s0={s0} shrank below {settings.eps_min}")
    return best


# ---------------------------------------------------------------------------
# cover and partition of unity


def _window_bump(s, center: float, eps: float):
    """Bump on (center - eps, center + eps) equal to 1 on the middle half."""
    s = np.asarray(s, dtype=float)
    x = (np.abs(s - center) - 0.5 * eps) / (0.5 * eps)
    return 1.0 - smooth_step(x)


@dataclass
class CoverPartition:
    locals: list[LocalWeight]
    delta0: float
    # chi_0 rises from 0 at delta0 to 1 at s_end, where the last window ends
    s_end: float

    def __post_init__(self):
        self.centers = np.array([lw.s0 for lw in self.locals])
        self.eps = np.array([lw.eps for lw in self.locals])
        self.lo = self.centers - self.eps
        self.hi = self.centers + self.eps

    @property
    def N(self) -> int:
        return len(self.locals)

    def chi0(self, s):
        a = np.abs(np.asarray(s, dtype=float))
        return smooth_step((a - self.delta0) / (self.s_end - self.delta0))

    def active(self, s: float) -> np.ndarray:
        """Indices i >= 1 (0-based into ``locals``) with xi_i(s) > 0."""
        a = abs(float(s))
        return np.flatnonzero((self.lo < a) & (self.hi > a) | (self.lo < -a) & (self.hi > -a))

    def chi(self, i: int, s):
        s = np.asarray(s, dtype=float)
        c, e = self.centers[i], self.eps[i]
        return _window_bump(s, c, e) + _window_bump(-s, c, e)

    def xi(self, s: float) -> tuple[float, dict[int, float]]:
        """(xi_0(s), {i: xi_i(s)}) for the windows active at s."""
        idx = self.active(s)
        chis = {int(i): float(self.chi(int(i), s)) for i in idx}
        c0 = float(self.chi0(s))
        total = c0 + sum(chis.values())
        return c0 / total, {i: c / total for i, c in chis.items() if c > 0}

    def xi_sum(self, s) -> np.ndarray:
        """sum_i xi_i(s), adding the individual normalised terms (a check of the normalisation)."""
        s = np.asarray(s, dtype=float)
        xi0, parts = self.xi_table(s.ravel())
        out = xi0.copy()
        for _, idx, x in parts:
            np.add.at(out, idx, x)
        return out.reshape(s.shape)

    def xi_sum_scalar(self, s) -> np.ndarray:
        """The same sum through the per-offset ``xi`` (independent of ``xi_table``)."""
        s = np.asarray(s, dtype=float)
        out = np.empty(s.shape)
        for j, x in enumerate(s.ravel()):
            x0, rest = self.xi(float(x))
            out.ravel()[j] = x0 + math.fsum(rest.values())
        return out

    def xi_table(self, s) -> tuple[np.ndarray, list[tuple[int, np.ndarray, np.ndarray]]]:
        """Vectorised partition: xi_0 values and, per window, (i, query idx, xi values)."""
        s = np.abs(np.asarray(s, dtype=float))
        order = np.argsort(s)
        ss = s[order]
        total = self.chi0(ss)
        parts = []
        for i in range(self.N):
            a = np.searchsorted(ss, max(self.lo[i], -self.hi[i]), side="right")
            b = np.searchsorted(ss, self.hi[i], side="left")
            if b <= a:
                continue
            idx = np.arange(a, b)
            c = self.chi(i, ss[idx])
            total[idx] += c
            parts.append((i, idx, c))
        xi0 = np.empty(s.shape)
        xi0[order] = self.chi0(ss) / total
        out = []
        for i, idx, c in parts:
            out.append((i, order[idx], c / total[idx]))
        return xi0, out


def build_cover(
    delta0: float,
    profile: RadialProfile,
    cfg: QuadratureConfig | None = None,
    settings: LocalWeightSettings | None = None,
    n_max: int = 8192,
    profiles: PlaneProfiles | None = None,
    progress=None,
) -> CoverPartition:
    """Greedy sweep s_1 = 0, s_{i+1} = s_i + eps_i/2 until the middle half of the last window passes delta0."""
    cfg = cfg or QuadratureConfig()
    profiles = profiles or PlaneProfiles(profile, cfg)
    locals_: list[LocalWeight] = []
    s = 0.0
    while True:
        lw = build_local_weight(s, delta0, profile, cfg, settings, profiles)
        locals_.append(lw)
        if len(locals_) > n_max:
            raise CoverTooLarge(f"cover needs more than {n_max} windows (reached s={s:.6f})")
        if progress is not None:
            progress(len(locals_), s, lw.eps)
        if s + 0.5 * lw.eps >= delta0:
            break
        s = s + 0.5 * lw.eps
    return CoverPartition(locals_, delta0, locals_[-1].s0 + locals_[-1].eps)


# ---------------------------------------------------------------------------
# assembled weight


@dataclass
class AssembledWeight:
    w0: W0Profile
    cover: CoverPartition
    delta0_info: Delta0Result | None = None
    settings: LocalWeightSettings = field(default_factory=LocalWeightSettings)

    @property
    def profile(self) -> RadialProfile:
        return self.w0.profile

    @property
    def delta0(self) -> float:
        return self.cover.delta0

    @property
    def N(self) -> int:
        return self.cover.N

    def terms(self, s: float):
        """(xi_0, [(xi_i, LocalWeight, ratio_i)]) at offset s."""
        xi0, xis = self.cover.xi(s)
        terms = []
        if xis:
            m0 = float(self.cover.locals[next(iter(xis))].m0(np.array([s]))[0])
            for i, x in xis.items():
                lw = self.cover.locals[i]
                n0 = float(lw.n0(np.array([s]))[0])
                terms.append((x, lw, m0 / n0))
        return xi0, terms

    def eval_on_plane(self, r, s: float):
        r = np.asarray(r, dtype=float)
        a = abs(float(s))
        if np.any(r < a - 1e-12):
            raise DomainError("point not on the plane: r < |s|")
        xi0, terms = self.terms(a)
        out = np.zeros(r.shape)
        if xi0 > 0:
            out = out + xi0 * self.w0.eval_on_plane(r, a)
        for x, lw, ratio in terms:
            out = out + x * lw.eval_on_plane(r, a, ratio)
        return out

    def __call__(self, r, s):
        r = np.asarray(r, dtype=float)
        if r.ndim == 0 or np.ndim(s) == 0:
            return self.eval_on_plane(r, float(s))
        return self.eval_pairs(r, s)

    def eval_pairs(self, r, s) -> np.ndarray:
        """W at arbitrary (r, s) pairs, vectorised over windows."""
        r = np.asarray(r, dtype=float)
        s = np.abs(np.asarray(s, dtype=float))
        if np.any(r < s - 1e-12):
            raise DomainError("point not on the plane: r < |s|")
        xi0, parts = self.cover.xi_table(s)
        out = np.zeros(s.shape)
        need0 = xi0 > 0
        if need0.any():
            _, C = self.w0.coefficient_table(s[need0])
            w = np.ones(need0.sum())
            for j, k in enumerate(self.w0.terms):
                col = C[:, j]
                if np.any(col):
                    w -= col * self.profile.f_k(int(k), r[need0])
            out[need0] += xi0[need0] * w
        if parts:
            touched = np.unique(np.concatenate([idx for _, idx, _ in parts]))
            m0 = np.zeros(s.shape)
            m0[touched] = self.cover.locals[0].profiles.m0(s[touched])
            for i, idx, x in parts:
                lw = self.cover.locals[i]
                lw.n_calls += 1
                lw.n_outside += int(np.count_nonzero(~lw.contains(s[idx])))
                ratio = m0[idx] / lw.n0(s[idx])
                rho = np.sqrt(np.maximum(r[idx] ** 2 - s[idx] ** 2, 0.0))
                out[idx] += x * (1.0 - lw.psi1(rho) * ratio)
        return out

    def breakpoints(self, s: float) -> list[float]:
        _, terms = self.terms(s)
        pts = []
        for _, lw, _ in terms:
            pts.extend(lw.breakpoints(s))
        return pts

    def outside_queries(self) -> int:
        return sum(lw.n_outside for lw in self.cover.locals)

    # serialisation ------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "assembled_weight",
            "profile": self.profile.to_dict(),
            "quadrature": self.w0.cfg.to_dict(),
            "local_settings": self.settings.to_dict(),
            "delta0": self.cover.delta0,
            "delta0_info": self.delta0_info.to_dict() if self.delta0_info else None,
            "s_end": self.cover.s_end,
            "locals": [lw.to_dict() for lw in self.cover.locals],
        }

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)

    @classmethod
    def from_dict(cls, d: dict) -> "AssembledWeight":
        if str(d.get("schema_version")) != SCHEMA_VERSION:
            raise ValueError(f"unsupported weight schema {d.get('schema_version')!r}")
        profile = RadialProfile.from_dict(d["profile"])
        cfg = QuadratureConfig(**d["quadrature"])
        settings = LocalWeightSettings(**d["local_settings"])
        w0 = W0Profile(profile, cfg)
        profiles = PlaneProfiles(profile, cfg)
        locals_ = [LocalWeight.from_dict(x, profile, profiles) for x in d["locals"]]
        info = Delta0Result(**d["delta0_info"]) if d.get("delta0_info") else None
        cover = CoverPartition(locals_, d["delta0"], d["s_end"])
        return cls(w0, cover, info, settings)

    @classmethod
    def load(cls, path) -> "AssembledWeight":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def build_assembled_weight(
    profile: RadialProfile | None = None,
    cfg: QuadratureConfig | None = None,
    settings: LocalWeightSettings | None = None,
    n_max: int = 8192,
    progress=None,
) -> AssembledWeight:
    profile = profile or RadialProfile(k_max=8)
    cfg = cfg or QuadratureConfig()
    settings = settings or LocalWeightSettings()
    w0 = W0Profile(profile, cfg)
    info = find_delta0(w0)
    profiles = PlaneProfiles(profile, cfg)
    cover = build_cover(info.delta0, profile, cfg, settings, n_max, profiles, progress)
    return AssembledWeight(w0, cover, info, settings)


def assembled_w_eval(r, s, w: AssembledWeight):
    r = np.asarray(r, dtype=float)
    if r.ndim == 0 and np.ndim(s) == 0:
        if r < abs(s) - 1e-12:
            raise DomainError("point not on the plane: r < |s|")
        return float(w.eval_on_plane(np.array([float(r)]), float(s))[0])
    return w(r, s)
