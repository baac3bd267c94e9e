"""Slab modes, FD eigenproblem and self-consistent frequency iteration."""

import math

import numpy as np
import pytest

from polariton.constants import C
from polariton.dispersion import (
    ConstantIndex,
    Sellmeier,
    group_velocity,
    phase_velocity,
    propagation_constant,
)
from polariton.errors import (
    BelowCutoff,
    NoConvergence,
    NoCutoffInWindow,
    NoGuidedModes,
    OutsideSlab,
)
from polariton.modes import (
    DiscreteMode,
    IndexProfile,
    SlabGuide,
    dispersion_curve,
    fd_transverse_modes,
    material_dispersion_velocities,
    self_consistent_omega,
    slab_beta,
    slab_cutoff,
    slab_mode_field,
    slab_velocities,
)

N0 = 1.5
D = 5e-6
GUIDE = SlabGuide(D, ConstantIndex(N0))
BK7 = Sellmeier(
    terms=(
        (1.03961212, 0.00600069867e-12),
        (0.231792344, 0.0200179144e-12),
        (1.01046945, 103.560653e-12),
    ),
    window=(8e14, 4e15),
)

# analytic cutoff of the m=1 branch for the reference slab
OMEGA_C1 = math.pi * C / (N0 * D)


def test_bulk_line_is_m_zero():
    for w in (1e14, 5e14, 1e15):
        assert slab_beta(GUIDE, 0, w) == pytest.approx(N0 * w / C, rel=1e-15)


def test_cutoff_value_m1():
    assert OMEGA_C1 == pytest.approx(1.25578e14, rel=1e-5)
    assert slab_beta(GUIDE, 1, OMEGA_C1 * (1 + 1e-9)) > 0
    with pytest.raises(BelowCutoff):
        slab_beta(GUIDE, 1, OMEGA_C1 * (1 - 1e-9))


def test_beta_against_closed_form():
    for m in range(1, 5):
        w = 1e15
        k = N0 * w / C
        expected = math.sqrt(k * k - (m * math.pi / D) ** 2)
        assert slab_beta(GUIDE, m, w) == pytest.approx(expected, rel=1e-15)


def test_cutoff_closed_form_and_linearity():
    assert slab_cutoff(GUIDE, 1) == pytest.approx(OMEGA_C1, rel=1e-15)
    assert slab_cutoff(GUIDE, 2) == pytest.approx(2 * OMEGA_C1, rel=1e-15)
    with pytest.raises(NoCutoffInWindow):
        slab_cutoff(GUIDE, 0)


def test_cutoff_root_solve_on_dispersive_model():
    # no closed form for a Sellmeier slab: the bisection result must put the
    # bulk wavenumber exactly at the transverse quantization value
    found = slab_cutoff(SlabGuide(3e-7, BK7), 1)
    k = propagation_constant(BK7, found)
    assert k == pytest.approx(math.pi / 3e-7, rel=1e-9)


def test_field_boundary_and_parity():
    for m in range(1, 5):
        assert slab_mode_field(GUIDE, m, D / 2) == pytest.approx(0.0, abs=1e-12)
        assert slab_mode_field(GUIDE, m, -D / 2) == pytest.approx(0.0, abs=1e-12)
    # fundamental: cosine, extremum on axis; m=2: sine, node on axis
    assert slab_mode_field(GUIDE, 1, 0.0) == 1.0
    assert slab_mode_field(GUIDE, 2, 0.0) == 0.0
    with pytest.raises(OutsideSlab):
        slab_mode_field(GUIDE, 1, 0.51 * D)


def test_field_square_integral_is_half_thickness():
    x = np.linspace(-D / 2, D / 2, 20001)
    for m in (1, 2, 3):
        vals = np.array([slab_mode_field(GUIDE, m, xi) for xi in x])
        assert np.trapezoid(vals**2, x) == pytest.approx(D / 2, rel=1e-7)


def test_velocity_product_identity():
    for m in range(5):
        w = 1e15
        v_g, v_p, theta = slab_velocities(GUIDE, m, w)
        assert v_g * v_p == pytest.approx((C / N0) ** 2, rel=1e-12)
        assert math.cos(theta) == pytest.approx(
            (slab_beta(GUIDE, m, w) if m else N0 * w / C) / (N0 * w / C), rel=1e-12
        )


def test_bulk_ray_and_asymptote():
    v_g, v_p, theta = slab_velocities(GUIDE, 0, 1e15)
    assert theta == 0.0
    assert v_g == v_p == pytest.approx(C / N0, rel=1e-15)
    # omega -> infinity at fixed m: the ray flattens toward the bulk values
    v_g_hi, _, theta_hi = slab_velocities(GUIDE, 1, 1e17)
    assert theta_hi < 1e-2
    assert v_g_hi == pytest.approx(C / N0, rel=1e-4)


def test_group_velocity_decreases_with_mode_order():
    vgs = [slab_velocities(GUIDE, m, 1e15)[0] for m in range(5)]
    assert all(a > b for a, b in zip(vgs, vgs[1:]))
    # and v_g < c/n <= v_p strictly for guided modes
    for m in range(1, 5):
        v_g, v_p, _ = slab_velocities(GUIDE, m, 1e15)
        assert v_g < C / N0 < v_p


def test_dispersion_curve_matches_bulk_for_m0():
    grid = np.linspace(1e12, 1e15, 200)
    curve = dispersion_curve(GUIDE, 0, grid)
    np.testing.assert_allclose(curve.beta, N0 * curve.omega / C, rtol=1e-15)


def test_dispersion_curve_slope_is_inverse_group_velocity():
    grid = np.linspace(3e14, 1e15, 2000)
    curve = dispersion_curve(GUIDE, 1, grid)
    mid = len(curve.omega) // 2
    h = curve.omega[mid + 1] - curve.omega[mid - 1]
    fd = (curve.beta[mid + 1] - curve.beta[mid - 1]) / h
    v_g, _, _ = slab_velocities(GUIDE, 1, curve.omega[mid])
    assert fd == pytest.approx(1.0 / v_g, rel=1e-6)


def test_dispersion_curve_skips_below_cutoff():
    grid = np.linspace(1e13, 1e15, 100)
    curve = dispersion_curve(GUIDE, 3, grid)
    assert curve.omega[0] > slab_cutoff(GUIDE, 3)
    assert np.all(curve.beta >= 0)
    assert np.all(np.diff(curve.beta) > 0)


def test_material_velocities_delegate():
    w = 2.2e15
    v_g, v_p = material_dispersion_velocities(BK7, w)
    assert v_g == group_velocity(BK7, w)
    assert v_p == phase_velocity(BK7, w)


def test_wide_slab_approaches_material_velocities():
    # D = 100 wavelengths: waveguide dispersion is negligible against the
    # material contribution
    w = 1.8e15
    lam = 2 * math.pi * C / w
    wide = SlabGuide(100 * lam, BK7)
    v_g_slab, v_p_slab, _ = slab_velocities(wide, 1, w)
    v_g_mat, v_p_mat = material_dispersion_velocities(BK7, w)
    assert abs(v_g_slab - v_g_mat) / v_g_mat < 0.01
    assert abs(v_p_slab - v_p_mat) / v_p_mat < 0.01


# ---------------------------------------------------------------------------
# finite differences


def fd_profile(n_points=501):
    return IndexProfile.uniform_1d(ConstantIndex(N0), D, n_points)


def test_profile_validation():
    with pytest.raises(ValueError):
        IndexProfile.uniform_1d(ConstantIndex(N0), D, 10)  # too coarse
    x = np.cumsum(np.linspace(1e-8, 2e-8, 80))
    with pytest.raises(ValueError):
        IndexProfile((x,), np.full(80, ConstantIndex(N0), dtype=object))


def test_fd_eigenvalues_match_slab():
    w = 1e15
    modes = fd_transverse_modes(fd_profile(), w, 4)
    for mode in modes:
        analytic = slab_beta(GUIDE, mode.rank + 1, w)
        assert mode.beta == pytest.approx(analytic, rel=1e-5)
        assert mode.guided
        assert mode.residual < 1e-8


def test_fd_second_order_convergence():
    w = 1e15
    errs = []
    for n in (500, 1001):  # h halves exactly: D/501 -> D/1002
        modes = fd_transverse_modes(IndexProfile.uniform_1d(ConstantIndex(N0), D, n), w, 4)
        analytic = [slab_beta(GUIDE, m, w) ** 2 for m in range(1, 5)]
        errs.append([abs(mode.beta_sq - a) / a for mode, a in zip(modes, analytic)])
    for e_coarse, e_fine in zip(*errs):
        assert 3.5 < e_coarse / e_fine < 4.5


def test_fd_mode_sign_changes_follow_rank():
    modes = fd_transverse_modes(fd_profile(), 1e15, 5)
    for mode in modes:
        signs = np.sign(mode.field[np.abs(mode.field) > 1e-8 * np.abs(mode.field).max()])
        changes = int(np.sum(signs[1:] != signs[:-1]))
        assert changes == mode.rank


def test_fd_fields_l2_orthonormal_and_sign_fixed():
    profile = fd_profile()
    modes = fd_transverse_modes(profile, 1e15, 3)
    cell = profile.cell_measure
    for i, mi in enumerate(modes):
        assert mi.field.flat[np.flatnonzero(np.abs(mi.field) > 1e-12)[0]] > 0
        for j, mj in enumerate(modes):
            dot = float(np.sum(mi.field * mj.field)) * cell
            assert dot == pytest.approx(1.0 if i == j else 0.0, abs=1e-10)


def test_fd_fundamental_approaches_bulk_in_wide_box():
    w = 1e15
    lam = 2 * math.pi * C / (w * N0)
    wide = IndexProfile.uniform_1d(ConstantIndex(N0), 40 * lam, 1500)
    mode = fd_transverse_modes(wide, w, 1)[0]
    bulk = N0 * w / C
    assert mode.beta < bulk
    assert mode.beta == pytest.approx(bulk, rel=1e-3)


def test_fd_no_guided_modes():
    # far below the fundamental cutoff of a narrow box everything is evanescent
    narrow = IndexProfile.uniform_1d(ConstantIndex(N0), 1e-6, 64)
    with pytest.raises(NoGuidedModes):
        fd_transverse_modes(narrow, 1e12, 2)


def test_fd_2d_square_box_eigenvalues():
    # separable box: beta^2 = k^2 - (p*pi/L)^2 - (q*pi/L)^2
    w = 1e15
    L = 5e-6
    profile = IndexProfile.uniform_2d(ConstantIndex(N0), L, L, 64, 64)
    mode = fd_transverse_modes(profile, w, 1)[0]
    k = N0 * w / C
    expected = math.sqrt(k * k - 2 * (math.pi / L) ** 2)
    assert mode.beta == pytest.approx(expected, rel=1e-3)


def test_self_consistent_constant_profile():
    profile = fd_profile()
    target = fd_transverse_modes(profile, 1e15, 1)[0].beta
    w, mode = self_consistent_omega(profile, target, 0, 1.1e15)
    assert w == pytest.approx(1e15, rel=1e-9)
    assert abs(mode.beta - target) < 1e-10 * target


def test_self_consistent_with_dispersion():
    profile = IndexProfile.uniform_1d(BK7, D, 301)
    w0 = 2.2e15
    target = 0.999 * propagation_constant(BK7, w0)
    w, mode = self_consistent_omega(profile, target, 0, w0)
    # substitute back into the analytic slab relation at the solved frequency
    guide = SlabGuide(D, BK7)
    analytic = slab_beta(guide, 1, w)
    assert mode.beta == pytest.approx(analytic, rel=1e-5)
    assert abs(mode.beta - target) < 1e-8 * target


def test_self_consistent_window_exit_surfaced():
    from polariton.errors import WindowExit

    model = ConstantIndex(N0, window=(9e14, 1.2e15))
    profile = IndexProfile.uniform_1d(model, D, 301)
    # the matching frequency lies far outside the validity window; the
    # iteration must report that instead of extrapolating
    target = N0 * 2.5e15 / C
    with pytest.raises(WindowExit):
        self_consistent_omega(profile, target, 0, 1.1e15)


def test_self_consistent_flat_objective_raises(monkeypatch):
    import polariton.modes as modes_mod

    profile = fd_profile()
    frozen = fd_transverse_modes(profile, 1e15, 1)[0]
    # inject a pathological solver whose eigenvalue ignores omega: the
    # secant denominator vanishes and must surface as NoConvergence
    monkeypatch.setattr(modes_mod, "_signed_beta_sq",
                        lambda prof, omega, rank: (frozen.beta_sq, frozen))
    with pytest.raises(NoConvergence):
        self_consistent_omega(profile, 2 * frozen.beta, 0, 1e15)
