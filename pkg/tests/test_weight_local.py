from __future__ import annotations

import math

import numpy as np
import pytest

from radon_kernel.errors import ConstructionFailed, CoverTooLarge, DomainError, SignSearchFailed
from radon_kernel.plane_quadrature import QuadratureConfig, integrate_plane_radial
from radon_kernel.radial_core import RadialProfile
from radon_kernel.radon_transform import rwf_reduced
from radon_kernel.weight_local import (
    AssembledWeight,
    LocalWeightSettings,
    PlaneProfiles,
    assembled_w_eval,
    build_cover,
    build_local_weight,
)
from radon_kernel.weight_w0 import W0Profile, find_delta0

CFG = QuadratureConfig()
P8 = RadialProfile(k_max=8)


@pytest.fixture(scope="module")
def delta0():
    return find_delta0(W0Profile(P8, CFG)).delta0


@pytest.fixture(scope="module")
def profiles():
    return PlaneProfiles(P8, CFG)


@pytest.fixture(scope="module", params=[0.0, 0.3, 0.62, 0.9])
def local(request, delta0, profiles):
    return build_local_weight(request.param, delta0, P8, CFG, profiles=profiles)


def _window_grid(lw, n=200):
    return np.linspace(max(lw.s0 - lw.eps, 0.0), lw.s0 + lw.eps, n + 2)[1:-1]


# ---------------------------------------------------------------- one local weight


def test_local_weight_at_least_half_on_window(local):
    """[PAPER] W >= 1/2 on a 200 x 200 (rho, s) grid over the window."""
    s = _window_grid(local)
    rho = np.linspace(0.0, 1.2, 200)
    W = 1.0 - local.psi1(rho)[None, :] * local.ratio(s)[:, None]
    assert W.min() >= 0.5


def test_local_weight_at_least_one_at_centre(local):
    """[PAPER] on the plane |s| = s0 the weight is >= 1."""
    r = np.sqrt(local.s0**2 + np.linspace(0.0, 1.2, 200) ** 2)
    assert local.eval_on_plane(r, local.s0).min() >= 1.0 - 1e-12
    assert local.eval_on_plane(r, -local.s0).min() >= 1.0 - 1e-12


def test_local_weight_zero_transform(local, scale8):
    """[PAPER] R_{W_i} f = 0 on the window."""
    for frac in (-0.95, -0.5, 0.0, 0.5, 0.95):
        s = max(local.s0 + frac * local.eps, 0.0)
        assert abs(rwf_reduced(s, local, CFG).value) <= 1e-6 * scale8


def test_local_weight_sign_condition(local):
    """[PAPER] sign(m0(s0)) sign(n0(s0)) = -1 when m0(s0) != 0."""
    assert local.n0_s0 != 0.0
    if local.m0_s0 != 0.0:
        assert math.copysign(1, local.m0_s0) * math.copysign(1, local.n0_s0) == -1


def test_local_weight_denominator_floor(local):
    """[TRIVIAL] |n0| >= 1/4 |n0(s0)| with constant sign on the window."""
    n0 = local.n0(_window_grid(local, 2000))
    assert np.all(n0 * math.copysign(1, local.n0_s0) >= 0.25 * abs(local.n0_s0))


def test_local_weight_psi1_on_constant_sign_piece(local):
    """[TRIVIAL] f(sqrt(s0^2 + rho^2)) has one sign on supp psi1, opposite to m0(s0)."""
    rho = np.linspace(local.psi1.rise_start, local.psi1.fall_end, 20001)[1:-1]
    fv = P8.f(np.sqrt(local.s0**2 + rho**2))
    want = -math.copysign(1, local.m0_s0) if local.m0_s0 != 0 else math.copysign(1, fv[fv.size // 2])
    assert np.all(fv * want >= 0)


def test_local_weight_window_cap(local, delta0):
    """[TRIVIAL] windows stay below (1 + delta0)/2 and start at most at 0.05."""
    assert 0 < local.eps <= 0.05
    assert local.s0 + local.eps <= 0.5 * (1 + delta0) + 1e-15


def test_n0_against_radial_quadrature(local):
    """[DERIVED] the fixed rho-rule for n0 vs an independent r-form integral."""
    for s in (local.s0, local.s0 + 0.5 * local.eps):
        def g(r, s=s):
            rho = np.sqrt(np.maximum(r * r - s * s, 0.0))
            return P8.f(r) * local.psi1(rho)

        ref = integrate_plane_radial(g, s, CFG, P8, breaks=local.breakpoints(s))
        assert float(local.n0(np.array([s]))[0]) == pytest.approx(ref.value, rel=1e-9, abs=1e-9 * ref.scale)


def test_local_weight_counts_outside_queries(local):
    """[TRIVIAL] evaluating off the window is recorded."""
    before = local.n_outside
    local.eval_on_plane(np.array([0.99]), min(local.s0 + 2 * local.eps, 0.98))
    assert local.n_outside == before + 1
    with pytest.raises(DomainError):
        local.eval_on_plane(np.array([0.0]), local.s0 + 0.01)


def test_construction_failed_when_eps_floor_too_high(delta0, profiles):
    """[TRIVIAL] the largest window near delta0 is below eps_min = 0.04."""
    with pytest.raises(ConstructionFailed):
        build_local_weight(0.955, delta0, P8, CFG, LocalWeightSettings(eps_min=0.04), profiles)


def test_sign_search_failed_above_last_shell(delta0, profiles):
    """[TRIVIAL] at s0 = 0.999 no shell of k_max = 8 lies above the plane."""
    with pytest.raises(SignSearchFailed):
        build_local_weight(0.999, delta0, P8, CFG, profiles=profiles)


def test_cover_too_large(delta0, profiles):
    """[TRIVIAL] five windows of width <= 0.1 cannot reach delta0."""
    with pytest.raises(CoverTooLarge):
        build_cover(delta0, P8, CFG, n_max=5, profiles=profiles)


# ---------------------------------------------------------------- cover


def test_xi_partition_of_unity(weight8):
    """[TRIVIAL] sum_i xi_i = 1 on a 1e4-point grid over [-1.5, 1.5]."""
    s = np.linspace(-1.5, 1.5, 10_000)
    assert np.max(np.abs(weight8.cover.xi_sum(s) - 1.0)) <= 1e-12
    assert np.max(np.abs(weight8.cover.xi_sum_scalar(s[::7]) - 1.0)) <= 1e-12


def test_xi_beyond_unit_offset(weight8):
    """[PAPER] xi_0(1.2) = 1 and every other xi_i(1.2) = 0."""
    xi0, rest = weight8.cover.xi(1.2)
    assert xi0 == 1.0 and rest == {}
    assert weight8.cover.s_end < 1.0


def test_cover_covers_delta0_interval(weight8):
    """[TRIVIAL] every |s| <= delta0 lies in some open window."""
    c = weight8.cover
    s = np.linspace(0.0, c.delta0, 200_001)
    covered = np.zeros(s.size, dtype=bool)
    order = np.argsort(c.lo)
    lo, hi = c.lo[order], np.maximum.accumulate(c.hi[order])
    j = np.searchsorted(lo, s, side="left") - 1
    covered = (j >= 0) & (hi[np.maximum(j, 0)] > s)
    covered |= s < c.hi[0]  # the window at 0 reaches below zero
    assert covered.all()


def test_xi_symmetric_and_supported(weight8):
    """[PAPER] xi_i(s) = xi_i(-s) and supp xi_i lies in its window."""
    c = weight8.cover
    rng = np.random.default_rng(5)
    for s in rng.uniform(0.0, 1.1, 300):
        a = c.xi(s)
        b = c.xi(-s)
        assert a == b
        for i in a[1]:
            assert c.lo[i] < s < c.hi[i] or c.lo[i] < -s < c.hi[i]


def test_xi_table_matches_scalar(weight8):
    """[DERIVED] vectorised partition vs the per-offset one."""
    c = weight8.cover
    s = np.random.default_rng(6).uniform(-1.2, 1.2, 400)
    xi0, parts = c.xi_table(s)
    full = np.zeros((s.size, c.N))
    for i, idx, x in parts:
        full[idx, i] = x
    for j, x in enumerate(s):
        a0, rest = c.xi(x)
        assert xi0[j] == pytest.approx(a0, abs=1e-15)
        for i, v in rest.items():
            assert full[j, i] == pytest.approx(v, abs=1e-15)
        assert np.count_nonzero(full[j] > 1e-15) <= len(rest)


# ---------------------------------------------------------------- assembled weight


def test_assembled_beyond_unit_offset(weight8):
    """[PAPER] W = 1 at s = 1.05 for any r >= s."""
    for r in (1.05, 1.1, 2.0):
        assert assembled_w_eval(r, 1.05, weight8) == 1.0
        assert assembled_w_eval(r, -1.05, weight8) == 1.0


def test_assembled_equals_w0_where_xi0_is_one(weight8):
    """[TRIVIAL] single-term sum for s_end <= |s| < 1."""
    for s in np.linspace(weight8.cover.s_end, 0.999, 7):
        r = np.linspace(s, 1.0, 501)
        assert np.array_equal(weight8.eval_on_plane(r, s), weight8.w0.eval_on_plane(r, s))


def test_assembled_domain_error(weight8):
    """[TRIVIAL] r < |s| is not a point on the plane."""
    with pytest.raises(DomainError):
        assembled_w_eval(0.3, 0.5, weight8)
    with pytest.raises(DomainError):
        weight8(np.array([0.3]), np.array([-0.5]))


def test_assembled_symmetry(weight8):
    """[PAPER] W(r, s) = W(r, -s) exactly."""
    rng = np.random.default_rng(7)
    s = rng.uniform(-1.2, 1.2, 20_000)
    r = np.abs(s) + rng.uniform(0, 1, s.size) * (1.2 - np.abs(s))
    assert np.array_equal(weight8(r, s), weight8(r, -s))


def test_assembled_pairs_match_plane_evaluation(weight8):
    """[DERIVED] vectorised pair evaluation vs per-plane evaluation."""
    rng = np.random.default_rng(8)
    for s in rng.uniform(0.0, 1.1, 40):
        r = np.linspace(s, 1.1, 97)
        a = weight8.eval_on_plane(r, s)
        b = weight8.eval_pairs(r, np.full(r.size, s))
        assert np.max(np.abs(a - b)) <= 1e-12


def test_assembled_positive_sample(weight8):
    """[PAPER] W >= 1/2 - 1e-9 on random points concentrated where f lives."""
    rng = np.random.default_rng(9)
    s = rng.uniform(0.0, 1.0, 50_000)
    r = s + rng.uniform(0, 1, s.size) * (1.0 - s)
    assert weight8(r, s).min() >= 0.5 - 1e-9


def test_assembled_never_queries_outside_windows(weight8):
    """[TRIVIAL] lazy-domain safety: no local weight is evaluated off its window."""
    rng = np.random.default_rng(10)
    s = rng.uniform(-1.2, 1.2, 20_000)
    r = np.abs(s) + rng.uniform(0, 1, s.size) * (1.2 - np.abs(s))
    weight8(r, s)
    for x in s[:200]:
        weight8.eval_on_plane(np.array([abs(x) + 0.01]), x)
    assert weight8.outside_queries() == 0


def test_assembled_continuity(weight8):
    """[DERIVED] 1e3 random slices at step 1e-4; bisecting the largest step finds no jump."""
    rng = np.random.default_rng(11)
    n, m, h = 1000, 101, 1e-4
    # half the slices move in s at fixed r, half in r at fixed s
    s0 = rng.uniform(0.0, 1.0, n)
    r0 = s0 + m * h + rng.uniform(0, 0.2, n)
    t = np.arange(m) * h
    S = np.where(np.arange(n)[:, None] < n // 2, s0[:, None] + t, s0[:, None])
    R = np.where(np.arange(n)[:, None] < n // 2, r0[:, None], r0[:, None] + t)
    W = weight8(R.ravel(), S.ravel()).reshape(n, m)
    d = np.abs(np.diff(W, axis=1))
    L = float(d.max() / h)
    assert math.isfinite(L)
    j = d.argmax(axis=1)
    rows = np.arange(n)
    a = np.stack([R[rows, j], S[rows, j]], axis=1)
    b = np.stack([R[rows, j + 1], S[rows, j + 1]], axis=1)
    wa, wb = W[rows, j], W[rows, j + 1]
    for _ in range(30):
        mid = 0.5 * (a + b)
        wm = weight8(mid[:, 0], mid[:, 1])
        left = np.abs(wm - wa) >= np.abs(wb - wm)
        b = np.where(left[:, None], mid, b)
        wb = np.where(left, wm, wb)
        a = np.where(left[:, None], a, mid)
        wa = np.where(left, wa, wm)
    # after 30 halvings the interval is ~1e-13 long: a jump would survive
    assert np.max(np.abs(wb - wa)) < 1e-4


def test_serialization_round_trip(weight8, tmp_path):
    """[TRIVIAL] save/load preserves every field and every value."""
    path = tmp_path / "w.json"
    weight8.save(path)
    w2 = AssembledWeight.load(path)
    assert w2.to_dict() == weight8.to_dict()
    rng = np.random.default_rng(12)
    s = rng.uniform(-1.2, 1.2, 5000)
    r = np.abs(s) + rng.uniform(0, 1, s.size) * (1.2 - np.abs(s))
    assert np.array_equal(w2(r, s), weight8(r, s))


def test_load_rejects_unknown_schema(weight8):
    """[TRIVIAL] the file format is versioned."""
    d = weight8.to_dict() | {"schema_version": "999"}
    with pytest.raises(ValueError):
        AssembledWeight.from_dict(d)
