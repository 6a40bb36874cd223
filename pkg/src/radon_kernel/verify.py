"""Certification harness: every estimate of the construction as a named check.

``run_suite`` executes the checks in a fixed order, optionally on a thread
pool, and returns a ``VerificationReport``.  The report is a pure function of
the configuration: wall-clock timings are kept out of it and written to a
separate file, so two runs with the same config produce identical bytes.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .errors import BudgetExceeded, NoIntersection, RadonKernelError
from .plane_quadrature import (
    QuadratureConfig,
    ShellPlaneIntegrals,
    integrate_plane_2d,
    integrate_plane_radial,
    plane_from_offset,
    plane_manifold_dimension,
    profile_rings,
    random_plane_d,
)
from .radial_core import PHI, RadialProfile, f_k_eval, line_shell_index, phi_derivative_max, shell_bounds
from .radon_transform import UnitWeight, rwf_plane_d, rwf_reduced, zero_scale
from .weight_local import AssembledWeight, LocalWeightSettings, build_assembled_weight
from .weight_w0 import (
    C2_constant,
    DyadicPartition,
    G_profile,
    H_k_profile,
    W0Profile,
    _offset_grid,
    c1_constant,
    k1_index,
    w0_decay_constant,
    shell_window,
)

__all__ = [
    "VerifyConfig",
    "CheckRecord",
    "VerificationReport",
    "LineEvidence",
    "check_sign_change",
    "random_line",
    "run_suite",
    "load_or_build_weight",
    "CHECK_ORDER",
    "REPORT_SCHEMA",
]

REPORT_SCHEMA = "1"


@dataclass(frozen=True)
class VerifyConfig:
    """Knobs of a verification run; loadable from a JSON file with the same keys."""

    k_max: int = 8
    seed: int = 20170301
    target_rel_tol: float = 1e-9
    oracle_rel_tol: float = 1e-6
    # "zero" means below this fraction of max_s |G(s)|
    zero_tol: float = 1e-6
    n_max: int = 8192
    workers: int = 1
    output_dir: str = "verify_out"
    # cached assembled weight; built and written there when missing
    weight_path: str | None = None
    # sample sizes
    n_partition: int = 10_000
    n_w0_zero: int = 50
    n_assembled: int = 200
    n_positivity: int = 100_000
    n_delta0_recheck: int = 10_000
    n_local: int = 6
    n_lines: int = 100
    n_planes: int = 10
    plane_dims: tuple[int, ...] = (4, 5)
    n_g_bound: int = 20
    n_h_bound: int = 12
    oracle_cases: int = 20
    # required failure factor of the tampered weight
    negative_factor: float = 1e3

    def __post_init__(self):
        object.__setattr__(self, "plane_dims", tuple(int(d) for d in self.plane_dims))
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def quadrature(self) -> QuadratureConfig:
        return QuadratureConfig(
            target_rel_tol=self.target_rel_tol, oracle_rel_tol=self.oracle_rel_tol, rng_seed=self.seed
        )

    def profile(self) -> RadialProfile:
        return RadialProfile(PHI, self.k_max)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["plane_dims"] = list(self.plane_dims)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "VerifyConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_file(cls, path) -> "VerifyConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class CheckRecord:
    check_id: str
    anchor: str
    grid: str
    measured: float
    bound: float
    status: str  # "pass" | "fail" | "inconclusive"
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "anchor": self.anchor,
            "grid": self.grid,
            "measured": self.measured,
            "bound": self.bound,
            "status": self.status,
            "details": self.details,
        }


@dataclass
class VerificationReport:
    metadata: dict
    checks: list[CheckRecord]
    curves: dict[str, tuple[list[str], list[list[float]]]] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, check_id: str) -> CheckRecord:
        for c in self.checks:
            if c.check_id == check_id:
                return c
        raise KeyError(check_id)

    def to_dict(self) -> dict:
        return {
            "schema_version": REPORT_SCHEMA,
            "metadata": self.metadata,
            "checks": [c.to_dict() for c in self.checks],
            "all_passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.to_dict()), indent=1, sort_keys=True) + "\n"

    def write(self, out_dir) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(self.to_json())
        for name, (header, rows) in self.curves.items():
            write_csv(out / f"{name}.csv", header, rows)
        (out / "timings.json").write_text(json.dumps(self.timings, indent=1, sort_keys=True) + "\n")
        return out / "report.json"


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        v = float(x)
        return v if math.isfinite(v) else repr(v)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def write_csv(path, header: list[str], rows) -> None:
    """Header row, fixed column order, floats written with repr (round-trip exact)."""
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(header)
        for row in rows:
            wr.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


# ---------------------------------------------------------------------------
# lines through the ball


@dataclass(frozen=True)
class LineEvidence:
    k: int
    t0: float
    t1: float
    t_pos: float
    t_neg: float
    n_samples: int
    # t1 - t0 >= (2/5) 2^-k
    length: float
    length_bound: float
    # 8^k (phi(t1) - phi(t0)) >= 2 pi
    phase_variation: float

    @property
    def length_ok(self) -> bool:
        # equality holds for lines through the origin; allow rounding there
        return self.length >= self.length_bound * (1.0 - 1e-12)

    @property
    def variation_ok(self) -> bool:
        return self.phase_variation >= 2.0 * math.pi

    def to_dict(self) -> dict:
        d = asdict(self)
        d["length_ok"] = self.length_ok
        d["variation_ok"] = self.variation_ok
        return d


def check_sign_change(x0, omega, k: int, chunk: int = 4096, max_samples: int = 50_000_000) -> LineEvidence:
    """Opposite-sign samples of f_k along x0 + omega t inside shell k.

    The sampling step is pi 8^-k / (2 max|phi'|) with phi(t) = |x0 + omega t|^2,
    a quarter of the shortest half-period of cos(8^k phi).  Both the bare
    cos(8^k phi(t)) and f_k at the ambient point are required to change sign.
    """
    x0 = np.asarray(x0, dtype=float)
    omega = np.asarray(omega, dtype=float)
    if abs(np.linalg.norm(omega) - 1.0) > 1e-12:
        raise ValueError("omega must be a unit vector")
    if abs(x0 @ omega) > 1e-12:
        raise ValueError("omega must be orthogonal to x0")
    a = float(np.linalg.norm(x0))
    r_in, r_out = shell_bounds(k)
    if a >= r_in:
        raise NoIntersection(f"line at distance {a} misses the inside of shell {k}")
    t0 = math.sqrt(r_in * r_in - a * a)
    t1 = math.sqrt(r_out * r_out - a * a)
    om = 8.0**k
    step = math.pi / om / (2.0 * 2.0 * t1)
    t_pos = t_neg = None
    n = 0
    start = t0
    while start < t1 and n < max_samples:
        t = start + step * np.arange(1, chunk + 1)
        t = t[t < t1]
        if t.size == 0:
            break
        n += t.size
        g = np.cos(om * (a * a + t * t))
        x = x0[None, :] + t[:, None] * omega[None, :]
        fk = f_k_eval(k, np.linalg.norm(x, axis=1))
        pos = np.flatnonzero((g > 0) & (fk > 0))
        neg = np.flatnonzero((g < 0) & (fk < 0))
        if t_pos is None and pos.size:
            t_pos = float(t[pos[0]])
        if t_neg is None and neg.size:
            t_neg = float(t[neg[0]])
        if t_pos is not None and t_neg is not None:
            break
        start = float(t[-1])
    if t_pos is None or t_neg is None:
        raise NoIntersection(f"no sign change of f_{k} found on the line after {n} samples")
    return LineEvidence(
        k=k,
        t0=t0,
        t1=t1,
        t_pos=t_pos,
        t_neg=t_neg,
        n_samples=n,
        length=t1 - t0,
        length_bound=0.4 * 2.0**-k,
        phase_variation=om * (t1 * t1 - t0 * t0),
    )


def random_line(rng: np.random.Generator, max_distance: float = 0.999):
    """Random line meeting the unit ball: foot point x0 and unit direction omega orthogonal to it."""
    u = rng.standard_normal(3)
    u /= np.linalg.norm(u)
    x0 = rng.uniform(0.0, max_distance) * u
    v = rng.standard_normal(3)
    v -= (v @ u) * u
    v /= np.linalg.norm(v)
    return x0, v


def sign_change_shell(x0_norm: float) -> int:
    """k = max(3, ceil(log2(6 / (5 (1 - |x0|)))))."""
    return max(3, math.ceil(math.log2(6.0 / (5.0 * (1.0 - x0_norm)))))


# ---------------------------------------------------------------------------
# weight cache


def weight_key(profile: RadialProfile, cfg: QuadratureConfig, settings: LocalWeightSettings, n_max: int) -> str:
    blob = json.dumps(
        {"profile": profile.to_dict(), "cfg": cfg.to_dict(), "settings": settings.to_dict(), "n_max": n_max},
        sort_keys=True,
    )
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def load_or_build_weight(
    profile: RadialProfile,
    cfg: QuadratureConfig,
    path=None,
    settings: LocalWeightSettings | None = None,
    n_max: int = 8192,
    progress=None,
) -> AssembledWeight:
    """Load a cached assembled weight whose parameters match, else build (and cache) it."""
    settings = settings or LocalWeightSettings()
    if path is not None and os.path.exists(path):
        w = AssembledWeight.load(path)
        if (
            w.profile == profile
            and w.w0.cfg == cfg
            and w.settings == settings
        ):
            return w
    w = build_assembled_weight(profile, cfg, settings, n_max, progress)
    if path is not None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        tmp = f"{path}.tmp{os.getpid()}"
        w.save(tmp)
        os.replace(tmp, path)
    return w


# ---------------------------------------------------------------------------
# the checks


class Context:
    """Shared, lazily built objects for one suite run."""

    def __init__(self, config: VerifyConfig, weight: AssembledWeight | None = None):
        self.config = config
        self.cfg = config.quadrature()
        self.profile = config.profile()
        self._weight = weight
        self._weight_error: Exception | None = None
        self.scale = zero_scale(self.profile, self.cfg)
        self.curves: dict[str, tuple[list[str], list[list[float]]]] = {}

    @property
    def weight(self) -> AssembledWeight:
        if self._weight is None:
            if self._weight_error is not None:
                raise self._weight_error
            try:
                self._weight = load_or_build_weight(
                    self.profile, self.cfg, self.config.weight_path, n_max=self.config.n_max
                )
            except RadonKernelError as exc:
                self._weight_error = exc
                raise
        return self._weight

    def rng(self, index: int) -> np.random.Generator:
        return np.random.default_rng([self.config.seed, index])


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def check_radial(ctx: Context, rng) -> CheckRecord:
    prof = ctx.profile
    r = rng.uniform(0.0, 1.1, 100_000)
    ks = list(prof.shells)
    vals = np.array([prof.f_k(k, r) for k in ks])
    overlap = 0.0
    for i in range(len(ks)):
        for j in range(i + 1, len(ks)):
            overlap = max(overlap, float(np.max(np.abs(vals[i] * vals[j]))))
    bound_excess = float(np.max(np.abs(vals))) - 1.0
    plateau_err = 0.0
    for k in ks:
        lo, hi = 1.0 - 1.1 * 2.0**-k, 1.0 - 0.9 * 2.0**-k
        rr = np.linspace(lo, hi, 1001)
        plateau_err = max(plateau_err, float(np.max(np.abs(prof.f(rr) - np.cos(8.0**k * rr * rr) / math.factorial(k)))))
    measured = max(overlap, plateau_err, bound_excess, 0.0)
    return CheckRecord(
        "radial_invariants",
        "disjoint shells, plateau identity, |f_k| <= 1",
        "1e5 random radii in [0, 1.1]; 1001-point plateau grids",
        measured,
        0.0,
        _status(measured == 0.0),
        {"overlap": overlap, "plateau_error": plateau_err, "sup_excess": bound_excess},
    )


def _oracle_cases(ctx: Context) -> list[tuple[str, RadialProfile, float]]:
    cases = []
    for s in (0.0, 0.3, 0.6, 0.85, 0.88):
        cases.append(("f", RadialProfile(PHI, 3), s))
    for s in (0.2, 0.5, 0.8, 0.86, 0.88):
        cases.append(("f3^2", RadialProfile(PHI, 3), s))
    for s in (0.88, 0.9, 0.92, 0.93, 0.94):
        cases.append(("f4^2", RadialProfile(PHI, 4), s))
    for s in (0.5, 0.55, 0.6, 0.65, 0.7):
        cases.append(("W f", RadialProfile(PHI, 3), s))
    return cases[: ctx.config.oracle_cases]


def check_oracle(ctx: Context, rng) -> CheckRecord:
    """1-D radial value against the Cartesian tensor oracle on the plane."""
    cfg = ctx.cfg
    rows = []
    worst = 0.0
    for kind, prof, s in _oracle_cases(ctx):
        breaks = ()
        rate = 8.0**prof.k_max
        max_width = 0.005
        if kind == "f":
            g, harmonic = prof.f, 1.0
        elif kind.endswith("^2"):
            k = prof.k_max
            g, harmonic, rate = (lambda r, k=k: f_k_eval(k, r) ** 2), 2.0, 2.0 * 8.0**k
        else:
            w = ctx.weight
            _, terms = w.terms(s)
            g, harmonic = low_profile_integrand(w, s, prof), 1.0
            breaks = tuple(w.breakpoints(s))
            # resolve the narrowest local bump that meets the low shells
            widths = [lw.psi1.fall_end - lw.psi1.rise_start for _, lw, _ in terms if lw.k_star <= prof.k_max]
            max_width = min([max_width] + [x / 8.0 for x in widths])
        ref = integrate_plane_radial(g, s, cfg, prof, harmonic=harmonic, breaks=breaks)
        oracle = integrate_plane_2d(
            lambda x, g=g: g(np.linalg.norm(x, axis=-1)),
            plane_from_offset(s, 3),
            cfg,
            phase_rate=rate,
            max_width=max_width,
            rings=profile_rings(prof, s),
        )
        denom = max(abs(ref.value), ref.scale)
        rel = abs(oracle.value - ref.value) / denom if denom > 0 else 0.0
        worst = max(worst, rel)
        rows.append([kind, s, ref.value, oracle.value, rel])
    ctx.curves["oracle_equivalence"] = (["integrand", "s", "radial", "tensor_2d", "rel_diff"], rows)
    return CheckRecord(
        "oracle_equivalence",
        "radial reduction vs 2-D plane quadrature",
        f"{len(rows)} cases over f, f3^2, f4^2, W f; relative to max(|value|, L1 norm of integrand)",
        worst,
        ctx.cfg.oracle_rel_tol,
        _status(worst <= ctx.cfg.oracle_rel_tol),
        {"cases": len(rows)},
    )


def low_profile_integrand(w: AssembledWeight, s: float, low: RadialProfile):
    """r -> W(r, s) f_low(r) with the assembled weight and a truncated profile."""
    xi0, terms = w.terms(s)
    a = abs(s)
    coeffs = w.w0.coefficients(a) if xi0 > 0 and a < 1.0 else {}

    def g(r):
        out = np.zeros(np.shape(r))
        if xi0 > 0:
            out = out + xi0 * w.w0.eval_on_plane(r, a, coeffs)
        for x, lw, ratio in terms:
            out = out + x * lw.eval_on_plane(r, a, ratio)
        return out * low.f(r)

    return g


def check_plane_bounds(ctx: Context, rng) -> CheckRecord:
    cfg = ctx.cfg
    prof = ctx.profile
    c1 = c1_constant(prof.bump)
    k1 = k1_index(prof.bump)
    C2 = C2_constant(prof.bump)
    plane = ShellPlaneIntegrals(prof.bump, cfg)
    tail = prof.plane_tail_bound()
    g_ratio = 0.0
    cross = 0.0
    rows = []
    for m in range(3, min(8, prof.k_max) + 1):
        lo = 1.0 - 2.0**-m
        grid = _offset_grid(lo, prof.outer_radius, prof.k_max, prof.bump, 4.0)
        G = plane.plane_integral(prof, grid, "f")
        bound = c1 * 4.0**-m / math.factorial(m)
        ratio = float(np.max(np.abs(G)) + tail) / bound
        g_ratio = max(g_ratio, ratio)
        # independent u-form values on a subset
        sub = grid[np.linspace(0, grid.size - 1, ctx.config.n_g_bound).astype(int)]
        for s in sub:
            gu, _ = G_profile(s, cfg, prof)
            gv = float(plane.plane_integral(prof, np.array([s]), "f")[0])
            cross = max(cross, abs(gu - gv) / ctx.scale)
        rows.append(["G", m, float(np.max(np.abs(G))), bound])
    # H_k: the stated range k1..k_max may be empty; also check k1, k1+1 and the
    # H_{k,1} bound for every k >= 3 up to max(k_max, k1 + 1)
    h_margin = math.inf
    h1_margin = math.inf
    k_hi = max(prof.k_max, k1 + 1)
    dmax = phi_derivative_max(prof.bump)
    for k in range(3, k_hi + 1):
        s_hi = 1.0 - 2.0 ** (-k + 1)
        # general form (may be negative for small k) and the k >= k1 form
        lower = math.pi / 40.0 * 2.0**-k - math.pi / 2.0 * 4.0**-k * dmax
        if k >= k1:
            lower = max(lower, C2 * 2.0**-k)
        h1_lower = math.pi / 40.0 * 2.0**-k
        h_min = math.inf
        for s in np.linspace(0.5 + 1e-3, s_hi, ctx.config.n_h_bound):
            h = H_k_profile(k, s, cfg, prof.bump)
            h_min = min(h_min, h.value)
            h1_margin = min(h1_margin, h.mean_part.value / h1_lower)
        if lower > 0:
            h_margin = min(h_margin, h_min / lower)
        rows.append(["H", k, h_min, lower])
    ctx.curves["plane_bounds"] = (["quantity", "index", "measured", "bound"], rows)
    ok = g_ratio <= 1.0 and h_margin >= 1.0 and h1_margin >= 1.0 and cross <= 1e-9
    return CheckRecord(
        "plane_bounds",
        "|G| <= c1 4^-m / m!, H_k >= C2 2^-k, H_k1 >= 2^-k pi/40",
        f"G on phase-resolving grids for m = 3..{min(8, prof.k_max)}; H_k at {ctx.config.n_h_bound} offsets, k = 3..{k_hi}",
        g_ratio,
        1.0,
        _status(ok),
        {
            "c1": c1,
            "C2": C2,
            "k1": k1,
            "G_ratio_max": g_ratio,
            "H_ratio_min": h_margin,
            "H1_ratio_min": h1_margin,
            "u_vs_v_form_G": cross,
            "stated_H_range_empty": k1 > min(8, prof.k_max),
        },
    )


def check_partitions(ctx: Context, rng) -> CheckRecord:
    n = ctx.config.n_partition
    part = DyadicPartition()
    s = np.linspace(0.5 + 1e-6, 1.0 - 1e-6, n)
    psi_dev = float(np.max(np.abs(part.partial_sum(s) - 1.0)))
    ss = np.linspace(-1.5, 1.5, n)
    cover = ctx.weight.cover
    xi_dev = float(np.max(np.abs(cover.xi_sum(ss) - 1.0)))
    # the per-offset route on a subsample, at s and -s
    sub = ss[:: max(1, n // 200)]
    xi_dev = max(xi_dev, float(np.max(np.abs(cover.xi_sum_scalar(sub) - 1.0))))
    sym = float(np.max(np.abs(cover.xi_sum_scalar(sub) - cover.xi_sum_scalar(-sub))))
    measured = max(psi_dev, xi_dev)
    return CheckRecord(
        "partition_sums",
        "sum psi_k = 1 on (1/2, 1); sum xi_i = 1 on R",
        f"{n}-point grids on (0.5+1e-6, 1-1e-6) and [-1.5, 1.5]",
        measured,
        1e-12,
        _status(measured <= 1e-12),
        {"psi_deviation": psi_dev, "xi_deviation": xi_dev, "xi_symmetry": sym},
    )


def w0_zero_offsets(n: int) -> np.ndarray:
    """n offsets in (0.5, 1.2]: half uniform, half geometric towards s = 1."""
    n_geo = n // 2
    uni = np.linspace(0.5, 1.2, n - n_geo + 1)[1:]
    geo = 1.0 - np.geomspace(2.0**-1.5, 2.0**-9.5, n_geo)
    return np.sort(np.concatenate([uni, geo]))


def _zero_run(ctx: Context, w0: W0Profile, offsets) -> tuple[float, list]:
    worst = 0.0
    rows = []
    for s in offsets:
        res = rwf_reduced(s, w0, ctx.cfg)
        worst = max(worst, abs(res.value) / ctx.scale)
        rows.append([float(s), res.value, res.error])
    return worst, rows


def check_w0_zero(ctx: Context, rng) -> CheckRecord:
    w0 = W0Profile(ctx.profile, ctx.cfg)
    offs = w0_zero_offsets(ctx.config.n_w0_zero)
    worst, rows = _zero_run(ctx, w0, offs)
    ctx.curves["w0_zero_test"] = (["s", "rwf_w0", "error_estimate"], rows)
    return CheckRecord(
        "w0_zero_test",
        "R_{W0} f = 0 for |s| > 1/2",
        f"{offs.size} offsets in (0.5, 1.2]; relative to max_s |G| = {ctx.scale!r}",
        worst,
        ctx.config.zero_tol,
        _status(worst <= ctx.config.zero_tol),
        {"scale": ctx.scale},
    )


def check_negative_control(ctx: Context, rng) -> CheckRecord:
    w0 = W0Profile(ctx.profile, ctx.cfg, psi_shift=1)
    offs = w0_zero_offsets(ctx.config.n_w0_zero)
    worst, rows = _zero_run(ctx, w0, offs)
    ctx.curves["negative_control"] = (["s", "rwf_tampered", "error_estimate"], rows)
    factor = worst / ctx.config.zero_tol
    return CheckRecord(
        "negative_control",
        "psi_{k-2} replaced by psi_{k-1} must break the zero test",
        f"same {offs.size} offsets as the W0 zero test",
        factor,
        ctx.config.negative_factor,
        _status(factor >= ctx.config.negative_factor),
        {"max_relative_residual": worst},
    )


def _lambda_grid(ctx: Context, k: int, per_radian: float) -> np.ndarray:
    lo, hi = shell_window(k)
    return _offset_grid(lo, hi, ctx.profile.k_max, ctx.profile.bump, per_radian)


def check_w0_decay(ctx: Context, rng) -> CheckRecord:
    w0 = W0Profile(ctx.profile, ctx.cfg)
    C = w0_decay_constant(ctx.profile.bump)
    ks = list(range(5, ctx.profile.k_max + 1))
    maxima = []
    ratio = 0.0
    rows = []
    for k in ks:
        grid = _lambda_grid(ctx, k, 8.0)
        m = float(np.max(w0.sup_deviation(grid)))
        bound = C * 2.0**-k * k**4
        maxima.append(m)
        ratio = max(ratio, m / bound)
        rows.append([k, m, bound])
    decreasing = all(b < a for a, b in zip(maxima[1:], maxima[2:])) if len(maxima) > 2 else True
    # measured C0: |1 - W0| / (rho log2(1/rho)^4), grid and 4x refined grid
    c0 = []
    for per in (4.0, 16.0):
        g = _offset_grid(0.55, 1.0 - 2.0**-ctx.profile.k_max, ctx.profile.k_max, ctx.profile.bump, per)
        rho = 1.0 - g
        c0.append(float(np.max(w0.sup_deviation(g) / (rho * np.log2(1.0 / rho) ** 4))))
    ctx.curves["w0_decay"] = (["k", "max_dev", "bound"], rows)
    ok = ratio <= 1.0 and decreasing and c0[1] <= 1.05 * c0[0]
    return CheckRecord(
        "w0_decay",
        "|1 - W0| <= C 2^-k k^4 on Lambda_k; shell maxima decrease for k >= 6",
        f"phase-resolving grids (8/rad) on Lambda_k, k = {ks[0] if ks else '-'}..{ctx.profile.k_max}",
        ratio,
        1.0,
        _status(ok),
        {"C": C, "shell_maxima": maxima, "decreasing_from_6": decreasing, "C0_ratio": c0[0], "C0_ratio_refined": c0[1]},
    )


def _w0_pairs(w0: W0Profile, r, s) -> np.ndarray:
    _, C = w0.coefficient_table(s)
    out = np.ones(s.shape)
    for j, k in enumerate(w0.terms):
        out -= C[:, j] * f_k_eval(int(k), r, w0.profile.bump)
    return out


def check_delta0(ctx: Context, rng) -> CheckRecord:
    w = ctx.weight
    d0 = w.delta0
    n = ctx.config.n_delta0_recheck
    s = rng.uniform(d0 + 1e-3, 1.0, n)
    r = s + rng.uniform(0.0, 1.0, n) * (1.0 - s)
    vals = _w0_pairs(w.w0, r, s)
    # the sup over r at each s, exactly
    dev = w.w0.sup_deviation(s)
    measured = float(min(vals.min(), 1.0 - dev.max()))
    info = w.delta0_info.to_dict() if w.delta0_info else {}
    return CheckRecord(
        "delta0_certification",
        "W0 >= 1/2 for |s| > delta0",
        f"{n} fresh random (r, s) with s in (delta0 + 1e-3, 1), plus sup over r",
        measured,
        0.5,
        _status(0.5 < d0 < 1.0 and measured >= 0.5),
        {"delta0": d0, **info},
    )


def check_local(ctx: Context, rng) -> CheckRecord:
    w = ctx.weight
    locals_ = w.cover.locals
    idx = np.unique(np.linspace(0, len(locals_) - 1, ctx.config.n_local).astype(int))
    zero = 0.0
    min_w = math.inf
    min_at_s0 = math.inf
    for i in idx:
        lw = locals_[int(i)]
        for frac in (-0.9, 0.0, 0.9):
            s = max(lw.s0 + frac * lw.eps, 0.0)
            zero = max(zero, abs(rwf_reduced(s, lw, ctx.cfg).value) / ctx.scale)
        ss = np.linspace(max(lw.s0 - lw.eps, 0.0), lw.s0 + lw.eps, 202)[1:-1]
        rho = np.linspace(0.0, 1.2, 200)
        ratio = lw.ratio(ss)
        W = 1.0 - lw.psi1(rho)[None, :] * ratio[:, None]
        min_w = min(min_w, float(W.min()))
        W0 = lw.eval_on_plane(np.sqrt(lw.s0**2 + rho**2), lw.s0)
        min_at_s0 = min(min_at_s0, float(W0.min()))
    ok = zero <= ctx.config.zero_tol and min_w >= 0.5 and min_at_s0 >= 1.0 - 1e-12
    return CheckRecord(
        "local_weights",
        "R_{W_i} f = 0 on the window, W_i >= 1/2 there, W_i >= 1 at s0",
        f"{idx.size} local weights; 3 offsets each; 200 x 200 (rho, s) grids",
        zero,
        ctx.config.zero_tol,
        _status(ok),
        {"min_W_on_window": min_w, "min_W_at_s0": min_at_s0, "N": len(locals_)},
    )


def check_assembled_zero(ctx: Context, rng) -> CheckRecord:
    w = ctx.weight
    offs = np.linspace(0.0, 1.2, ctx.config.n_assembled)
    worst = 0.0
    rows = []
    for s in offs:
        res = rwf_reduced(s, w, ctx.cfg)
        g = rwf_reduced(s, UnitWeight(w.profile), ctx.cfg)
        worst = max(worst, abs(res.value) / ctx.scale)
        rows.append([float(s), res.value, g.value, res.error])
    ctx.curves["assembled_zero_test"] = (["s", "rwf", "G", "error_estimate"], rows)
    return CheckRecord(
        "assembled_zero_test",
        "R_W f = 0 for every plane",
        f"{offs.size} offsets in [0, 1.2]; relative to max_s |G| = {ctx.scale!r}",
        worst,
        ctx.config.zero_tol,
        _status(worst <= ctx.config.zero_tol),
        {"scale": ctx.scale, "N": w.N, "delta0": w.delta0},
    )


def positivity_samples(rng: np.random.Generator, n: int, delta0: float) -> tuple[np.ndarray, np.ndarray]:
    """Half uniform over 0 <= |s| <= 1.2, |s| <= r <= 1.2; half concentrated where f lives."""
    n1 = n // 2
    s1 = rng.uniform(-1.2, 1.2, n1)
    r1 = np.abs(s1) + rng.uniform(0.0, 1.0, n1) * (1.2 - np.abs(s1))
    n2 = n - n1
    s2 = rng.uniform(0.0, 1.0, n2) * np.where(rng.uniform(size=n2) < 0.5, 1.0, delta0)
    r2 = np.abs(s2) + rng.uniform(0.0, 1.0, n2) * np.clip(1.0 - np.abs(s2), 0.0, None)
    return np.concatenate([r1, r2]), np.concatenate([s1, s2])


def check_positivity(ctx: Context, rng) -> CheckRecord:
    w = ctx.weight
    r, s = positivity_samples(rng, ctx.config.n_positivity, w.delta0)
    vals = w(r, s)
    sym = float(np.max(np.abs(vals - w(r, -s))))
    m = float(vals.min())
    bound = 0.5 - 1e-9
    return CheckRecord(
        "positivity",
        "W >= 1/2 everywhere",
        f"{r.size} random (r, s) pairs",
        m,
        bound,
        _status(m >= bound and sym == 0.0),
        {"symmetry_defect": sym, "outside_queries": w.outside_queries()},
    )


def check_planes_d(ctx: Context, rng) -> CheckRecord:
    w = ctx.weight
    unit = UnitWeight(w.profile)
    worst_match = 0.0
    worst_zero = 0.0
    rows = []
    for d in ctx.config.plane_dims:
        for _ in range(ctx.config.n_planes):
            s = float(rng.uniform(0.0, 1.2))
            plane = random_plane_d(d, s, rng)
            a = rwf_plane_d(plane, w, ctx.cfg)
            b = rwf_reduced(s, w, ctx.cfg)
            ua = rwf_plane_d(plane, unit, ctx.cfg)
            ub = rwf_reduced(s, unit, ctx.cfg)
            rev = rwf_plane_d(plane.reversed(), w, ctx.cfg)
            match = max(abs(a.value - b.value), abs(ua.value - ub.value), abs(rev.value - a.value))
            match /= max(abs(ub.value), ctx.scale)
            worst_match = max(worst_match, match)
            worst_zero = max(worst_zero, abs(a.value) / ctx.scale)
            rows.append([d, s, a.value, b.value, ua.value, ub.value])
    dims = {d: plane_manifold_dimension(d, ctx.rng(10_000 + d)) for d in ctx.config.plane_dims}
    dims_ok = all(v == 3 * d - 6 for d, v in dims.items())
    ctx.curves["planes_d"] = (["d", "offset", "rwf_plane", "rwf_reduced", "G_plane", "G_reduced"], rows)
    tol = ctx.config.oracle_rel_tol
    ok = worst_match <= tol and worst_zero <= ctx.config.zero_tol and dims_ok
    return CheckRecord(
        "planes_d",
        "R_W^{d,2} f = 0 for 2-planes in R^d",
        f"{ctx.config.n_planes} random planes per d in {list(ctx.config.plane_dims)}, offsets in (0, 1.2)",
        max(worst_match, worst_zero),
        min(tol, ctx.config.zero_tol),
        _status(ok),
        {"match": worst_match, "zero": worst_zero, "manifold_dimension": {str(k): v for k, v in dims.items()}},
    )


def check_sign_lines(ctx: Context, rng) -> CheckRecord:
    n_ok = 0
    worst_len = math.inf
    all_var = True
    all_len = True
    rows = []
    for _ in range(ctx.config.n_lines):
        x0, om = random_line(rng)
        a = float(np.linalg.norm(x0))
        k = sign_change_shell(a)
        try:
            ev = check_sign_change(x0, om, k)
        except NoIntersection:
            # strict inequality fails exactly at a shell radius; use the next shell
            k = line_shell_index(a)
            ev = check_sign_change(x0, om, k)
        n_ok += 1
        worst_len = min(worst_len, ev.length / ev.length_bound)
        all_len &= ev.length_ok
        all_var &= ev.variation_ok
        rows.append([a, k, ev.t0, ev.t1, ev.t_pos, ev.t_neg])
    ctx.curves["sign_change_evidence"] = (["x0_norm", "k", "t0", "t1", "t_pos", "t_neg"], rows)
    ok = n_ok == ctx.config.n_lines and all_len and all_var
    return CheckRecord(
        "sign_change_lines",
        "f changes sign on every line meeting the ball",
        f"{ctx.config.n_lines} random lines, |x0| in [0, 0.999)",
        worst_len,
        1.0,
        _status(ok),
        {"lines_with_evidence": n_ok, "phase_variation_ok": all_var},
    )


CHECK_ORDER = [
    ("radial_invariants", check_radial),
    ("oracle_equivalence", check_oracle),
    ("plane_bounds", check_plane_bounds),
    ("partition_sums", check_partitions),
    ("w0_zero_test", check_w0_zero),
    ("negative_control", check_negative_control),
    ("w0_decay", check_w0_decay),
    ("delta0_certification", check_delta0),
    ("local_weights", check_local),
    ("assembled_zero_test", check_assembled_zero),
    ("positivity", check_positivity),
    ("planes_d", check_planes_d),
    ("sign_change_lines", check_sign_lines),
]


def _run_one(ctx: Context, index: int, check_id: str, fn) -> tuple[CheckRecord, float]:
    t = time.perf_counter()
    try:
        rec = fn(ctx, ctx.rng(index))
    except (BudgetExceeded, RadonKernelError) as exc:
        rec = CheckRecord(check_id, "", "", math.nan, math.nan, "inconclusive", {"error": f"{type(exc).__name__}: {exc}"})
    return rec, time.perf_counter() - t


def run_suite(
    config: VerifyConfig | None = None,
    weight: AssembledWeight | None = None,
    only: list[str] | None = None,
) -> VerificationReport:
    config = config or VerifyConfig()
    ctx = Context(config, weight)
    todo = [(i, cid, fn) for i, (cid, fn) in enumerate(CHECK_ORDER) if only is None or cid in only]
    needs_weight = {"oracle_equivalence", "partition_sums", "delta0_certification", "local_weights",
                    "assembled_zero_test", "positivity", "planes_d"}
    if any(cid in needs_weight for _, cid, _ in todo):
        try:
            ctx.weight  # build once, before any worker starts
        except RadonKernelError:
            pass
    if config.workers == 1:
        results = [_run_one(ctx, i, cid, fn) for i, cid, fn in todo]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            futures = [pool.submit(_run_one, ctx, i, cid, fn) for i, cid, fn in todo]
            results = [f.result() for f in futures]
    checks = [r for r, _ in results]
    timings = {rec.check_id: t for rec, t in results}
    meta = {
        "k_max": config.k_max,
        "seed": config.seed,
        "config": config.to_dict() | {"workers": None, "output_dir": None, "weight_path": None},
        "quadrature": ctx.cfg.to_dict(),
        "scale_max_abs_G": ctx.scale,
        "c1": c1_constant(ctx.profile.bump),
        "C2": C2_constant(ctx.profile.bump),
        "k1": k1_index(ctx.profile.bump),
        "w0_decay_C": w0_decay_constant(ctx.profile.bump),
    }
    if ctx._weight is not None:
        meta["delta0"] = ctx._weight.delta0
        meta["N"] = ctx._weight.N
    for rec in checks:
        if rec.check_id == "w0_decay" and rec.status != "inconclusive":
            meta["C0_ratio"] = rec.details["C0_ratio"]
    return VerificationReport(meta, checks, ctx.curves, timings)


def small_config(**overrides) -> VerifyConfig:
    """Reduced sample sizes for smoke runs and determinism checks."""
    base = dict(
        n_partition=2000,
        n_w0_zero=10,
        n_assembled=12,
        n_positivity=5000,
        n_delta0_recheck=2000,
        n_local=2,
        n_lines=10,
        n_planes=1,
        n_g_bound=3,
        n_h_bound=3,
        oracle_cases=0,
    )
    base.update(overrides)
    return VerifyConfig(**base)
