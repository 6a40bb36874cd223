from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from radon_kernel.errors import DomainError
from radon_kernel.plane_quadrature import (
    QuadratureConfig,
    integrate_plane_2d,
    integrate_plane_polar,
    plane_from_offset,
    profile_rings,
    radial_ambient,
)
from radon_kernel.radial_core import PHI, RadialProfile, f_k_eval, phi_derivative_max, shell_bounds, smooth_step
from radon_kernel.weight_w0 import (
    C2_constant,
    DyadicPartition,
    G_profile,
    H_k_profile,
    W0Profile,
    _offset_grid,
    c1_constant,
    find_delta0,
    k1_index,
    w0_decay_constant,
    psi_k,
    shell_window,
    w0_eval,
)

CFG = QuadratureConfig()
P8 = RadialProfile(k_max=8)


@pytest.fixture(scope="module")
def w0():
    return W0Profile(P8, CFG)


@pytest.fixture(scope="module")
def delta0_8(w0):
    return find_delta0(w0)


# ---------------------------------------------------------------- psi_k


def test_psi_sum_at_three_quarters():
    """[TRIVIAL] sum_k psi_k(0.75) = 1."""
    total = sum(float(psi_k(k, 0.75)) for k in range(1, 60))
    assert total == pytest.approx(1.0, abs=1e-15)


def test_psi3_vanishes_outside_support():
    """[TRIVIAL] psi_3 = 0 at 1 - 2^-2 and 1 - 2^-5."""
    assert float(psi_k(3, 1 - 2.0**-2)) == 0.0
    assert float(psi_k(3, 1 - 2.0**-5)) == 0.0


def test_psi_at_integer_tau():
    """[DERIVED] tau = 3: psi_k = S(4-k) - S(3-k) is nonzero only for k in {2, 3}."""
    s = 1 - 2.0**-3
    vals = {k: float(psi_k(k, s)) for k in range(1, 30)}
    assert all(v == 0.0 for k, v in vals.items() if k not in (2, 3))
    assert vals[2] + vals[3] == 1.0
    # direct evaluation of the step at the integer offsets
    assert vals[3] == float(smooth_step(1.0) - smooth_step(0.0))


def test_psi_vanishes_off_half_one():
    """[TRIVIAL] psi_k = 0 outside (1/2, 1)."""
    for k in range(1, 8):
        assert float(psi_k(k, 0.5)) == 0.0
        assert float(psi_k(k, 1.0)) == 0.0
        assert float(psi_k(k, 0.2)) == 0.0


@given(st.floats(0.5 + 1e-9, 1 - 1e-9), st.integers(1, 40))
def test_psi_support(s, k):
    """[PAPER] supp psi_k lies in (1 - 2^{-k+1}, 1 - 2^{-k-1})."""
    if float(psi_k(k, s)) != 0.0:
        assert 1 - 2.0 ** (-k + 1) < s < 1 - 2.0 ** (-k - 1)


@given(st.floats(0.5 + 1e-9, 1 - 1e-9), st.integers(1, 40))
def test_psi_partial_sums_telescope(s, n):
    """[DERIVED] sum_{k<=n} psi_k = 1 - S(tau - n)."""
    part = DyadicPartition()
    tau = -math.log2(1 - s)
    assert float(part.partial_sum(s, 1, n)) == pytest.approx(1 - float(smooth_step(tau - n)), abs=1e-14)


def test_psi_partition_grid():
    """[PAPER] sum_k psi_k = 1 on (1/2, 1) to 1e-12."""
    s = np.linspace(0.5 + 1e-6, 1 - 1e-6, 10_000)
    assert np.max(np.abs(DyadicPartition().partial_sum(s) - 1.0)) <= 1e-12


@given(st.floats(0.5 + 1e-9, 1 - 1e-9), st.integers(1, 40))
def test_psi_nonnegative(s, k):
    """[TRIVIAL] S is monotone, so every psi_k >= 0."""
    assert float(psi_k(k, s)) >= 0.0


# ---------------------------------------------------------------- constants


def test_constants():
    """[PAPER] c1 = (4 pi/3) max|Phi'|; k1 smallest k >= 3 with C2 > 0."""
    d = phi_derivative_max()
    assert c1_constant() == 4 * math.pi / 3 * d
    k1 = k1_index()
    assert C2_constant() > 0
    assert math.pi / 40 - 2.0 ** -(k1 - 1) * math.pi / 2 * d <= 0 or k1 == 3
    assert w0_decay_constant() == 2.0**12 * c1_constant() ** 2 / C2_constant()


def test_k1_for_standard_bump():
    """[DERIVED] max|Phi'| of the standard bump is ~20, which forces k1 = 9."""
    assert 19 < phi_derivative_max() < 21
    assert k1_index() == 9


# ---------------------------------------------------------------- G


def test_G_outside_ball():
    """[TRIVIAL] empty support for |s| >= 1."""
    assert G_profile(1.0, CFG, P8)[0] == 0.0
    assert G_profile(-1.3, CFG, P8)[0] == 0.0


@pytest.mark.parametrize("m", range(3, 9))
def test_G_decay_bound(m):
    """[PAPER] |G(s)| <= c1 4^-m / m! for |s| >= 1 - 2^-m."""
    c1 = c1_constant()
    bound = c1 * 4.0**-m / math.factorial(m)
    for s in np.linspace(1 - 2.0**-m, 0.999, 25):
        g, tail = G_profile(s, CFG, P8)
        assert abs(g) + tail <= bound


def test_G_matches_polar_oracle_k8():
    """[DERIVED] u-form profile vs polar quadrature of f on the plane at 0.9."""
    g, _ = G_profile(0.9, CFG, P8)
    ref = integrate_plane_polar(radial_ambient(P8.f), plane_from_offset(0.9), CFG, P8)
    assert abs(g - ref.value) <= 1e-6 * max(abs(ref.value), ref.scale)


def test_G_matches_tensor_oracle_k4():
    """[DERIVED] Cartesian 2-D oracle at k_max = 4 (tractable on a tensor grid)."""
    p4 = RadialProfile(k_max=4)
    g, _ = G_profile(0.9, CFG, p4)
    ref = integrate_plane_2d(radial_ambient(p4.f), plane_from_offset(0.9), CFG, phase_rate=8.0**4, rings=profile_rings(p4, 0.9))
    assert abs(g - ref.value) <= 1e-6 * max(abs(ref.value), ref.scale)


def test_G_v_form_matches_u_form(w0):
    """[DERIVED] the batched v-form profile equals the per-offset u-form sum."""
    s = np.array([0.55, 0.7, 0.81, 0.9, 0.95, 0.97, 0.99])
    batched = w0.G(s)
    for x, b in zip(s, batched):
        assert b == pytest.approx(G_profile(x, CFG, P8)[0], abs=1e-12)


# ---------------------------------------------------------------- H_k


@pytest.mark.parametrize("k", range(3, 10))
def test_H_lower_bounds(k):
    """[PAPER] H_k >= (pi/40) 2^-k - (pi/2) 4^-k max|Phi| max|Phi'| and H_k1 >= 2^-k pi/40."""
    d = phi_derivative_max()
    lower = math.pi / 40 * 2.0**-k - math.pi / 2 * 4.0**-k * d
    for s in np.linspace(0.5 + 1e-3, 1 - 2.0 ** (-k + 1), 15):
        h = H_k_profile(k, s, CFG)
        assert h.value >= lower
        assert h.mean_part.value >= 2.0**-k * math.pi / 40
        assert h.value > 0


def test_H_uses_C2_from_k1():
    """[PAPER] H_k >= C2 2^-k for k >= k1."""
    k1 = k1_index()
    C2 = C2_constant()
    for k in (k1, k1 + 1):
        for s in np.linspace(0.51, 1 - 2.0 ** (-k + 1), 3):
            assert H_k_profile(k, s, CFG).value >= C2 * 2.0**-k


def test_H4_matches_tensor_oracle():
    """[DERIVED] plane integral of f_4^2 at s = 0.9 vs the Cartesian oracle."""
    h = H_k_profile(4, 0.9, CFG)
    p4 = RadialProfile(k_max=4)
    ref = integrate_plane_2d(
        radial_ambient(lambda r: f_k_eval(4, r) ** 2),
        plane_from_offset(0.9),
        CFG,
        phase_rate=2 * 8.0**4,
        rings=profile_rings(p4, 0.9),
    )
    assert abs(h.value - ref.value) <= 1e-6 * abs(ref.value)


def test_H_profile_agrees_with_batched(w0):
    """[DERIVED] u-form H_k vs v-form cumulative tails."""
    for k in (3, 5, 7):
        s = np.linspace(0.51, 1 - 2.0 ** (-k + 1), 6)
        batched = w0.H(k, s)
        for x, b in zip(s, batched):
            assert b == pytest.approx(H_k_profile(k, x, CFG).value, rel=1e-10)


# ---------------------------------------------------------------- W0


def test_w0_is_one_beyond_unit_offset():
    """[PAPER] W0 = 1 for |s| >= 1."""
    r = np.linspace(1.05, 2.0, 20)
    assert np.all(w0_eval(r, 1.05) == 1.0)
    assert np.all(w0_eval(r, -1.05) == 1.0)


def test_w0_is_one_off_the_shells(w0):
    """[TRIVIAL] all f_k(r) = 0 between shells."""
    gap = 0.5 * (shell_bounds(3)[1] + shell_bounds(4)[0])
    assert float(w0.eval_on_plane(np.array([gap]), 0.75)[0]) == 1.0
    assert float(w0.eval_on_plane(np.array([1.05]), 0.9)[0]) == 1.0


def test_w0_domain_errors(w0):
    """[TRIVIAL] undefined for |s| <= 1/2 and for points off the plane."""
    with pytest.raises(DomainError):
        w0.eval_on_plane(np.array([0.8]), 0.5)
    with pytest.raises(DomainError):
        w0.eval_on_plane(np.array([0.8]), -0.3)
    with pytest.raises(DomainError):
        w0.eval_on_plane(np.array([0.6]), 0.7)
    with pytest.raises(DomainError):
        w0.coefficients(0.4)


def test_w0_at_most_two_terms(w0):
    """[PAPER] no more than two summands are active at any offset."""
    s = np.linspace(0.5 + 1e-6, 1 - 1e-6, 5000)
    _, C = w0.coefficient_table(s)
    assert np.max(np.count_nonzero(C, axis=1)) <= 2


def test_w0_coefficients_match_table(w0):
    """[TRIVIAL] scalar and vectorised coefficients agree."""
    s = np.array([0.6, 0.77, 0.88, 0.93, 0.97])
    ks, C = w0.coefficient_table(s)
    for i, x in enumerate(s):
        c = w0.coefficients(x)
        for j, k in enumerate(ks):
            assert C[i, j] == pytest.approx(c.get(int(k), 0.0), rel=1e-13, abs=0)


def test_w0_sup_deviation_vs_dense_r_grid(w0):
    """[DERIVED] sup_r |1 - W0| from coefficients equals a dense r-grid maximum."""
    for s in (0.6, 0.8, 0.91, 0.96):
        r = np.linspace(s, 1.0, 400_001)
        dense = float(np.max(np.abs(1.0 - w0.eval_on_plane(r, s))))
        sup = float(w0.sup_deviation(np.array([s]))[0])
        # scalar and batched G differ at the rounding level of G
        assert dense <= sup * (1 + 1e-8)
        assert dense >= sup * (1 - 1e-4)


@pytest.mark.parametrize("k", range(5, 9))
def test_w0_decay_bound(w0, k):
    """[PAPER] |1 - W0| <= C 2^-k k^4 on Lambda_k with C = 2^12 c1^2 c2."""
    lo, hi = shell_window(k)
    grid = _offset_grid(lo, hi, 8, PHI, 8.0)
    m = float(np.max(w0.sup_deviation(grid)))
    assert m <= w0_decay_constant() * 2.0**-k * k**4


def test_w0_shell_maxima_decrease(w0):
    """[PAPER] W0 -> 1 as |s| -> 1: shell maxima decrease from k = 6."""
    maxima = []
    for k in range(6, 9):
        lo, hi = shell_window(k)
        maxima.append(float(np.max(w0.sup_deviation(_offset_grid(lo, hi, 8, PHI, 8.0)))))
    assert all(b < a for a, b in zip(maxima, maxima[1:]))


def test_telescoping_identity(w0):
    """[DERIVED] sum over active terms of c_k H_k / k! equals G * sum_k psi_{k-2}."""
    for s in (0.55, 0.72, 0.9, 0.97):
        c = w0.coefficients(s)
        lhs = sum(v * float(w0.H(k, np.array([s]))[0]) / math.factorial(k) for k, v in c.items())
        psi = sum(float(psi_k(k - 2, s)) for k in w0.terms)
        g = float(w0.G(np.array([s]))[0])
        assert lhs == pytest.approx(g * psi, rel=1e-12, abs=1e-18)


# ---------------------------------------------------------------- delta0


def test_delta0_in_range(delta0_8):
    """[PAPER] delta0 lies in (1/2, 1)."""
    assert 0.5 < delta0_8.delta0 < 1.0
    assert delta0_8.max_deviation_beyond < 0.5
    assert delta0_8.tail_bound < 0.5


def test_delta0_fresh_seed_recheck(w0, delta0_8):
    """[DERIVED] W0 >= 1/2 on 1e4 random (r, s) with s in (delta0 + 1e-3, 1)."""
    rng = np.random.default_rng(987654)
    s = rng.uniform(delta0_8.delta0 + 1e-3, 1.0, 10_000)
    r = s + rng.uniform(0, 1, s.size) * (1.0 - s)
    _, C = w0.coefficient_table(s)
    vals = np.ones(s.size)
    for j, k in enumerate(w0.terms):
        vals -= C[:, j] * f_k_eval(int(k), r)
    assert vals.min() >= 0.5


def test_delta0_tail_beyond_grid(w0, delta0_8):
    """[DERIVED] beyond the certified grid W0 >= 1/2 on a fresh dense s-grid."""
    s = np.linspace(delta0_8.grid_end, 1 - 1e-9, 20_000)
    assert float(np.max(w0.sup_deviation(s))) < 0.5


@pytest.mark.slow
def test_delta0_monotone_in_truncation(delta0_8):
    """[DERIVED] delta0(k_max = 10) >= delta0(k_max = 12) - grid step."""
    cfg = replace(CFG, max_evals=400_000_000)
    d10 = find_delta0(W0Profile(RadialProfile(k_max=10), cfg))
    d12 = find_delta0(W0Profile(RadialProfile(k_max=12), cfg))
    grid = _offset_grid(0.5, d12.grid_end, 12, PHI, 8.0)
    i = int(np.searchsorted(grid, d12.delta0))
    step = float(grid[min(i + 1, grid.size - 1)] - grid[max(i - 1, 0)])
    assert d10.delta0 >= d12.delta0 - step
    # the top shells do not move the threshold at all
    assert d10.delta0 == delta0_8.delta0
