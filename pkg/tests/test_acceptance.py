"""Acceptance gate: one test per top-level criterion, one printed line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
PASS/FAIL lines on the terminal.
"""

import math
import time

import numpy as np
from scipy.optimize import brentq

from polariton.constants import C, EPS0, HBAR
from polariton.dispersion import (
    ConstantIndex,
    LinearIndex,
    Sellmeier,
    group_velocity,
    inverse_permittivity,
    permittivity,
    propagation_constant,
    velocity_ratio_R,
)
from polariton.energy import (
    SpectralDensity,
    photon_flux_per_mode,
    stationary_energy_density,
    stationary_energy_density_eta,
)
from polariton.modes import (
    IndexProfile,
    SlabGuide,
    dispersion_curve,
    fd_transverse_modes,
    material_dispersion_velocities,
    self_consistent_omega,
    slab_beta,
    slab_velocities,
)
from polariton.quantization import (
    approx_project,
    continuum_commutator_check,
    displacement_field,
    field_coefficients_beta,
    field_coefficients_discrete,
    field_coefficients_omega,
    nonorthogonality_bracket,
    normalize_mode,
    omega_relabel_jacobian_residual,
    plain_weighted_overlap,
    plane_wave_amplitude,
    weight_function,
)

N0 = 1.5
D = 5e-6
GUIDE = SlabGuide(D, ConstantIndex(N0))
ONE_TERM = Sellmeier(terms=((1.0, 1e-14),), window=(1e15, 4e15))
BK7 = Sellmeier(
    terms=(
        (1.03961212, 0.00600069867e-12),
        (0.231792344, 0.0200179144e-12),
        (1.01046945, 103.560653e-12),
    ),
    window=(8e14, 4e15),
)


def report(num, name, ok, detail=""):
    line = f"ACCEPTANCE {num} [{name}]: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f" ({detail})"
    print(line)
    return ok


def test_criterion_1_slab_curve_reproduction():
    t0 = time.perf_counter()
    grid = np.linspace(1e12, 1e15, 500)

    # (a) m = 0 equals the bulk line pointwise
    curve0 = dispersion_curve(GUIDE, 0, grid)
    err_a = float(np.max(np.abs(curve0.beta - N0 * curve0.omega / C)
                         / (N0 * curve0.omega / C)))
    ok_a = err_a < 1e-12

    # (b) cutoffs located by independent bisection on the radicand
    ok_b, err_b = True, 0.0
    for m in range(1, 5):
        def radicand(w, m=m):
            return (N0 * w / C) ** 2 - (m * math.pi / D) ** 2
        found = brentq(radicand, 1e10, 1e15, rtol=1e-13)
        analytic = m * math.pi * C / (N0 * D)
        err_b = max(err_b, abs(found - analytic) / analytic)
    ok_b = err_b < 1e-9

    # (c) ordering in m and asymptotic merge with the bulk line at 1e15
    curves = [dispersion_curve(GUIDE, m, grid) for m in range(1, 5)]
    onsets = [c.omega[0] for c in curves]
    ordered = all(a < b for a, b in zip(onsets, onsets[1:]))
    bulk_hi = N0 * 1e15 / C
    merge = min(slab_beta(GUIDE, m, 1e15) / bulk_hi for m in range(1, 5))
    ok_c = ordered and merge > 0.999

    elapsed = time.perf_counter() - t0
    ok = ok_a and ok_b and ok_c and elapsed < 1.0
    report(1, "slab curve reproduction", ok,
           f"m0 err {err_a:.1e}; cutoff err {err_b:.1e}; "
           f"merge ratio {merge:.4f} vs > 0.999; {elapsed:.2f}s")
    assert ok_a and ok_b
    assert ordered
    assert elapsed < 1.0
    # the merge threshold as stated: beta_m/beta_bulk > 0.999 at 1e15 for all
    # m <= 4. Direct evaluation of the closed form gives 0.9921 (m=1) down to
    # 0.8647 (m=4) at omega = 1e15, so the threshold is not reachable there.
    assert merge > 0.999


def test_criterion_2_fd_vs_analytic_slab():
    t0 = time.perf_counter()
    w = 1e15
    analytic = [slab_beta(GUIDE, m, w) ** 2 for m in range(1, 5)]

    errs = {}
    for n_pts in (1000, 2001):  # h = D/1001 then D/2002: exact halving
        modes = fd_transverse_modes(IndexProfile.uniform_1d(ConstantIndex(N0), D, n_pts),
                                    w, 4)
        errs[n_pts] = [abs(mode.beta_sq - a) / a for mode, a in zip(modes, analytic)]

    ok_tol = max(errs[2001]) < 1e-4
    ratios = [c / f for c, f in zip(errs[1000], errs[2001])]
    ok_order = all(3.5 < r < 4.5 for r in ratios)
    elapsed = time.perf_counter() - t0
    ok = ok_tol and ok_order and elapsed < 10.0
    report(2, "FD vs analytic slab", ok,
           f"max rel err {max(errs[2001]):.1e}; h-halving ratios "
           f"{', '.join(f'{r:.2f}' for r in ratios)}; {elapsed:.2f}s")
    assert ok


def test_criterion_3_energy_identities():
    t0 = time.perf_counter()
    spec = SpectralDensity.gaussian(center=2.2e15, width=1e14, peak=1e-3)
    rep = stationary_energy_density(ONE_TERM, spec)
    total_eta = stationary_energy_density_eta(ONE_TERM, spec)
    err_a = abs(rep.W_total - total_eta) / abs(rep.W_total)

    err_b = 0.0
    for w, density, flux, _ in rep.per_frequency:
        if density:
            err_b = max(err_b, abs(flux / density - group_velocity(ONE_TERM, w))
                        / group_velocity(ONE_TERM, w))

    control = stationary_energy_density(ConstantIndex(N0, window=(1e15, 4e15)), spec)
    ok_c = control.W_E == control.W_B
    elapsed = time.perf_counter() - t0
    ok = err_a < 1e-12 and err_b < 1e-10 and ok_c and elapsed < 1.0
    report(3, "energy identities", ok,
           f"formulation err {err_a:.1e}; flux/density err {err_b:.1e}; "
           f"W_E==W_B {ok_c}; {elapsed:.2f}s")
    assert ok


def test_criterion_4_velocity_ratio_forms():
    rng = np.random.default_rng(2024)
    omegas = rng.uniform(1.1e15, 3.9e15, size=1000)
    for w in omegas:
        velocity_ratio_R(ONE_TERM, w)  # raises FormMismatch beyond 1e-10

    err = 0.0
    for w in omegas[:200]:
        h = 1e-6 * w
        fd = (propagation_constant(ONE_TERM, w + h)
              - propagation_constant(ONE_TERM, w - h)) / (2 * h)
        err = max(err, abs(1.0 / group_velocity(ONE_TERM, w) - fd) * group_velocity(ONE_TERM, w))
    ok = err < 1e-6
    report(4, "velocity-ratio forms", ok,
           f"1000 omegas cross-checked; 1/v_g FD err {err:.1e}")
    assert ok


def test_criterion_5_normalization_and_vacuum():
    prof = IndexProfile.uniform_1d(ConstantIndex(N0), D, 501)
    worst_norm = 0.0
    for mode in fd_transverse_modes(prof, 1e15, 4):
        nm = normalize_mode(mode, prof)
        rho = weight_function(prof, nm.omega).values
        integral = float(np.sum(rho * np.abs(nm.u) ** 2)) * prof.cell_measure
        worst_norm = max(worst_norm, abs(integral - 1.0))
    ok_norm = worst_norm < 1e-10

    w, vol = 2.2e15, 1e-18
    fc = field_coefficients_discrete(w, ConstantIndex(1.0), vol)
    vac_e = math.sqrt(HBAR * w / (2 * EPS0 * vol))
    ok_vac = (abs(fc.c_E - vac_e) <= 4 * np.spacing(vac_e)
              and abs(fc.c_B - vac_e / C) <= 4 * np.spacing(vac_e / C)
              and abs(plane_wave_amplitude(ConstantIndex(1.0), w, vol) ** 2 * vol - 1.0)
              < 1e-14)

    err_pair = 0.0
    for model in (ConstantIndex(1.0), ConstantIndex(N0), BK7):
        f = field_coefficients_discrete(w, model, vol)
        err_pair = max(err_pair, abs(f.c_D / (permittivity(model, w) * f.c_E) - 1.0))
    ok_pair = err_pair < 1e-12
    ok = ok_norm and ok_vac and ok_pair
    report(5, "normalization and vacuum reduction", ok,
           f"norm err {worst_norm:.1e}; vacuum forms {ok_vac}; c_D/(eps c_E) err {err_pair:.1e}")
    assert ok


def _step_profile(slope):
    core = LinearIndex(n_ref=1.5, slope=slope, omega_ref=1e15, window=(1e13, 1e16))
    clad = ConstantIndex(1.0, window=(1e13, 1e16))
    return IndexProfile.step_1d(core, clad, 2e-6, 8e-6, 601)


def _offset_step_profile(slope, n_points=601):
    # core displaced from the domain center: broken parity keeps the region
    # integrals of mode products from vanishing by symmetry alone
    core = LinearIndex(n_ref=1.5, slope=slope, omega_ref=1e15, window=(1e13, 1e16))
    clad = ConstantIndex(1.0, window=(1e13, 1e16))
    domain = 8e-6
    h = domain / (n_points + 1)
    x = -domain / 2 + h * np.arange(1, n_points + 1)
    models = np.where((x >= -2.5e-6) & (x <= -0.5e-6), core, clad).astype(object)
    return IndexProfile((x,), models)


def test_criterion_6_nonorthogonality_suite():
    # (a) same-omega FD modes: bracket < 1e-8 relative
    prof = IndexProfile.uniform_1d(ConstantIndex(N0), D, 501)
    nms = [normalize_mode(m, prof) for m in fd_transverse_modes(prof, 1e15, 3)]
    diag = abs(nonorthogonality_bracket(
        nms[0].omega, displacement_field(nms[0]),
        nms[0].omega, displacement_field(nms[0]), prof))
    off = max(abs(nonorthogonality_bracket(
        nms[i].omega, displacement_field(nms[i]),
        nms[j].omega, displacement_field(nms[j]), prof))
        for i in range(3) for j in range(i + 1, 3))
    ok_a = off / diag < 1e-8

    # (b) nondispersive collapse to the plain eta weighting, machine precision
    sprof = _step_profile(0.0)
    na = normalize_mode(fd_transverse_modes(sprof, 1e15, 1)[0], sprof)
    nb = normalize_mode(fd_transverse_modes(sprof, 1.07e15, 1)[0], sprof)
    da, db = displacement_field(na), displacement_field(nb)
    bracket = nonorthogonality_bracket(na.omega, da, nb.omega, db, sprof)
    eta = sprof.map_models(lambda m: inverse_permittivity(m, 1e15))
    # without dispersion the bracket is eta times the r-independent constant
    # (1 + omega_l/omega_j): the orthogonality statement is the plain eta one
    plain = complex(np.sum(eta * np.conj(db) * da) * sprof.cell_measure)
    factor = 1.0 + nb.omega / na.omega
    scale = float(np.sum(eta * np.abs(db) * np.abs(da))) * sprof.cell_measure
    ok_b = abs(bracket - factor * plain) <= 1e-13 * factor * scale

    # (c) dispersion sweep: overlap grows monotonically, projector tracks it
    beta_target = 0.98 * propagation_constant(ConstantIndex(1.5), 1e15)
    overlaps, errors = [], []
    for slope in (0.0, 2e-17, 8e-17):
        p = _offset_step_profile(slope)
        w0, m0 = self_consistent_omega(p, beta_target, 0, 1e15)
        w1, m1 = self_consistent_omega(p, beta_target, 1, 1.2e15)
        n0, n1 = normalize_mode(m0, p), normalize_mode(m1, p)
        overlaps.append(abs(plain_weighted_overlap(n0, n1, p, omega_bar=w0)))
        snapshot = displacement_field(n0) + 0.5 * displacement_field(n1)
        errors.append(abs(approx_project(snapshot, n0, p) - 1.0))
    ok_c = (overlaps[0] < 1e-8 and overlaps[0] < overlaps[1] < overlaps[2]
            and all(e < 10 * o + 1e-8 for o, e in zip(overlaps[1:], errors[1:])))

    ok = ok_a and ok_b and ok_c
    report(6, "nonorthogonality suite", ok,
           f"same-omega {off / diag:.1e}; collapse {abs(bracket - factor * plain) / (factor * scale):.1e}; "
           f"sweep overlaps {', '.join(f'{o:.1e}' for o in overlaps)}")
    assert ok


def test_criterion_7_continuum_bookkeeping():
    # sum-to-integral identity exact at arbitrary L
    ok_sum = all(
        continuum_commutator_check(L, 1e6 + (2 * math.pi / L) * np.arange(64))
        .sum_identity_residual == 0.0
        for L in (1e-3, 0.7, 13.0))

    # O(1/L) delta-weight convergence, worst-case mid-cell sampling
    center, width = 1.1e6, 2e4
    f = lambda b: math.exp(-0.5 * ((b - center) / width) ** 2)
    errs = []
    for L in (1e-2, 2e-2):
        spacing = 2 * math.pi / L
        grid = 1e6 + spacing * np.arange(int(2e5 / spacing) + 2)
        node = grid[np.argmin(np.abs(grid - (center + width)))]
        errs.append(continuum_commutator_check(L, grid, test_fn=f,
                                               beta0=node + spacing / 2).delta_error)
    ok_delta = 1.5 < errs[0] / errs[1] < 2.5

    res = omega_relabel_jacobian_residual(
        BK7, 2.0e15, 2.4e15, lambda w: math.exp(-(((w - 2.2e15) / 1e14) ** 2)))
    ok_jac = res < 1e-10

    w = 1e15
    base = LinearIndex(n_ref=1.5, slope=0.0, omega_ref=w, window=(1e13, 1e16))
    pert = LinearIndex(n_ref=1.5, slope=5e-17, omega_ref=w, window=(1e13, 1e16))
    fo0, fo1 = (field_coefficients_omega(w, m, 1e-12) for m in (base, pert))
    fb0, fb1 = (field_coefficients_beta(w, m, 1e-12) for m in (base, pert))
    ok_kernel = (abs(fo1.c_E - fo0.c_E) <= 1e-14 * fo0.c_E
                 and abs(fb1.c_E - fb0.c_E) > 1e-6 * fb0.c_E)

    ok = ok_sum and ok_delta and ok_jac and ok_kernel
    report(7, "continuum bookkeeping", ok,
           f"sum exact {ok_sum}; delta ratio {errs[0] / errs[1]:.2f}; "
           f"jacobian {res:.1e}; kernel invariance {ok_kernel}")
    assert ok


def test_criterion_8_slab_velocity_identities():
    err_prod = 0.0
    w = 1e15
    vgs = []
    for m in range(5):
        v_g, v_p, _ = slab_velocities(GUIDE, m, w)
        vgs.append(v_g)
        err_prod = max(err_prod, abs(v_g * v_p - (C / N0) ** 2) / (C / N0) ** 2)
    ok_prod = err_prod < 1e-12
    ok_mono = all(a > b for a, b in zip(vgs, vgs[1:]))

    w_mat = 1.8e15
    lam = 2 * math.pi * C / w_mat
    wide = SlabGuide(100 * lam, BK7)
    v_g_slab, v_p_slab, _ = slab_velocities(wide, 1, w_mat)
    v_g_mat, v_p_mat = material_dispersion_velocities(BK7, w_mat)
    ok_wide = (abs(v_g_slab - v_g_mat) / v_g_mat < 0.01
               and abs(v_p_slab - v_p_mat) / v_p_mat < 0.01)

    ok = ok_prod and ok_mono and ok_wide
    report(8, "slab velocity identities", ok,
           f"product err {err_prod:.1e}; monotone {ok_mono}; "
           f"wide-slab v_g dev {abs(v_g_slab - v_g_mat) / v_g_mat:.3%}")
    assert ok


def test_criterion_9_photon_flux_cross_check():
    from polariton.quantization import poynting_per_photon_assembled

    w, vol = 2.2e15, 1e-18
    err = 0.0
    for model in (ConstantIndex(1.0), ConstantIndex(N0), BK7):
        a = photon_flux_per_mode(w, model, vol)
        b = poynting_per_photon_assembled(w, model, vol)
        err = max(err, abs(a - b) / a)
    ok = err < 1e-12
    report(9, "photon-flux cross-check", ok, f"max rel err {err:.1e}")
    assert ok
