"""Batch front end: config ingestion, task dispatch, CSV/report emission.

Usage::

    polariton <task> --config cfg.json [--out DIR]

Tasks: dispersion | energy | slab-curves | fd-modes | quantize |
flux-check | projector-demo | continuum-check.

Every run writes the task's CSV artifacts plus report.txt listing each
checked identity with its measured residual. Exit status: 0 if all checks
pass, 2 on configuration errors, 3 on a failed numerical identity.
Floats are printed with 17 significant digits so identical configs yield
byte-identical artifacts. The environment variable POLARITON_THREADS caps
the number of worker threads used for independent per-mode computations.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import energy as energy_mod
from . import modes as modes_mod
from . import quantization as quant_mod
from .constants import C
from .dispersion import (
    inverse_permittivity,
    model_from_dict,
    permittivity,
    phase_velocity,
    propagation_constant,
    refractive_index,
    velocity_ratio_R,
)
from .errors import ConfigError, PolaritonError

TASKS = (
    "dispersion", "energy", "slab-curves", "fd-modes",
    "quantize", "flux-check", "projector-demo", "continuum-check",
)

FLOAT_FMT = "{:.17g}"


def _fmt(x) -> str:
    return FLOAT_FMT.format(float(x))


def _max_workers() -> int:
    try:
        return max(1, int(os.environ.get("POLARITON_THREADS", "1")))
    except ValueError:
        return 1


class Report:
    """Collects PASS/FAIL lines for report.txt."""

    def __init__(self):
        self.lines = []
        self.failed = []

    def check(self, name: str, residual: float, tol: float):
        ok = residual <= tol
        self.lines.append(
            f"{'PASS' if ok else 'FAIL'} {name} residual={_fmt(residual)} tol={_fmt(tol)}"
        )
        if not ok:
            self.failed.append(name)

    def note(self, text: str):
        self.lines.append(f"INFO {text}")

    def write(self, out_dir: Path):
        (out_dir / "report.txt").write_text("\n".join(self.lines) + "\n")


def _write_csv(path: Path, header: str, rows):
    with path.open("w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) if not isinstance(v, str) else v
                              for v in row) + "\n")


def _write_svg(path: Path, curves, width=640, height=480):
    """Minimal dependency-free SVG line plot: curves = [(label, x, y), ...]."""
    xs = np.concatenate([c[1] for c in curves])
    ys = np.concatenate([c[2] for c in curves])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    sx = lambda x: 50 + (x - x0) / (x1 - x0 or 1.0) * (width - 70)
    sy = lambda y: height - 40 - (y - y0) / (y1 - y0 or 1.0) * (height - 60)
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">']
    parts.append(f'<rect width="{width}" height="{height}" fill="white"/>')
    colors = ["black", "tab:blue", "crimson", "seagreen", "darkorange", "purple"]
    for i, (label, x, y) in enumerate(curves):
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
        dash = ' stroke-dasharray="6 4"' if label.endswith("bulk") else ""
        parts.append(
            f'<polyline fill="none" stroke="{colors[i % len(colors)]}"{dash} points="{pts}"/>'
        )
    parts.append("</svg>")
    path.write_text("\n".join(parts))


# ---------------------------------------------------------------------------
# Config parsing helpers


def _frequency_grid(config) -> np.ndarray:
    spec = config.get("frequency_grid_rad_s")
    if spec is None:
        raise ConfigError("missing frequency_grid_rad_s")
    if isinstance(spec, dict) and "list" in spec:
        return np.asarray(spec["list"], dtype=float)
    return np.linspace(float(spec["start"]), float(spec["stop"]), int(spec["points"]))


def _medium(config):
    if "medium" not in config:
        raise ConfigError("missing medium")
    return model_from_dict(config["medium"])


def _spectrum(config, base: Path) -> energy_mod.SpectralDensity:
    if "spectrum_csv" in config:
        return energy_mod.SpectralDensity.from_csv(base / config["spectrum_csv"])
    spec = config.get("spectrum")
    if spec and "gaussian" in spec:
        g = spec["gaussian"]
        return energy_mod.SpectralDensity.gaussian(
            center=float(g["center_rad_s"]), width=float(g["width_rad_s"]),
            peak=float(g.get("peak", 1.0)), n_points=int(g.get("points", 201)),
        )
    raise ConfigError("missing spectrum (spectrum_csv or spectrum.gaussian)")


def _profile(config) -> modes_mod.IndexProfile:
    spec = config.get("profile")
    if spec is None:
        raise ConfigError("missing profile")
    kind = spec.get("kind")
    if kind == "uniform_1d":
        return modes_mod.IndexProfile.uniform_1d(
            model_from_dict(spec["medium"]), float(spec["width_m"]), int(spec["points"]))
    if kind == "step_1d":
        return modes_mod.IndexProfile.step_1d(
            model_from_dict(spec["core"]), model_from_dict(spec["clad"]),
            float(spec["core_width_m"]), float(spec["domain_width_m"]),
            int(spec["points"]))
    raise ConfigError(f"unknown profile kind: {kind!r}")


# ---------------------------------------------------------------------------
# Validation (diagnostics only; never mutates files)


def validate(config: dict, base: Path = Path(".")) -> list[str]:
    """Schema and physics validation; returns a list of diagnostics."""
    diags = []
    task = config.get("task")
    if task not in TASKS:
        diags.append(f"task must be one of {TASKS}, got {task!r}")
        return diags

    needs_medium = task in ("dispersion", "energy", "slab-curves", "quantize",
                            "flux-check")
    if needs_medium:
        try:
            model = _medium(config)
        except (ConfigError, KeyError, ValueError) as exc:
            diags.append(f"medium: {exc}")
            model = None
    else:
        model = None

    if task in ("dispersion", "slab-curves", "quantize"):
        try:
            grid = _frequency_grid(config)
            if model is not None:
                lo, hi = model.window
                bad = grid[(grid < lo) | (grid > hi)]
                if bad.size and task != "slab-curves":
                    diags.append(
                        f"frequency grid leaves the validity window "
                        f"[{_fmt(lo)}, {_fmt(hi)}] rad/s at "
                        f"omega in [{_fmt(bad.min())}, {_fmt(bad.max())}]"
                    )
        except (ConfigError, KeyError, ValueError) as exc:
            diags.append(f"frequency grid: {exc}")

    if task == "slab-curves":
        d = config.get("geometry", {}).get("slab", {}).get("D_m")
        if d is None or d <= 0:
            diags.append("geometry.slab.D_m must be positive")

    if task in ("energy", "flux-check"):
        try:
            spec = _spectrum(config, base)
            if model is not None:
                lo, hi = model.window
                if spec.omega[0] < lo or spec.omega[-1] > hi:
                    diags.append(
                        f"spectrum support [{_fmt(spec.omega[0])}, "
                        f"{_fmt(spec.omega[-1])}] rad/s leaves the validity "
                        f"window [{_fmt(lo)}, {_fmt(hi)}]"
                    )
        except (ConfigError, FileNotFoundError, PolaritonError, ValueError) as exc:
            diags.append(f"spectrum: {exc}")

    if task in ("fd-modes", "projector-demo"):
        try:
            profile = _profile(config)
            omega = float(config.get("omega_rad_s", 0.0))
            if omega:
                n_max = math.sqrt(float(profile.n_squared(omega).max()))
                lam = 2 * math.pi * C / (omega * n_max)
                if max(profile.spacing) > lam / 50:
                    diags.append(
                        f"grid spacing {_fmt(max(profile.spacing))} m coarser "
                        f"than lambda/50 = {_fmt(lam / 50)} m"
                    )
        except (ConfigError, PolaritonError, KeyError, ValueError) as exc:
            diags.append(f"profile: {exc}")

    if task == "quantize":
        geom = config.get("geometry", {}).get("bulk", {})
        if not (geom.get("V_m3", 0) > 0 or geom.get("A_m2", 0) > 0):
            diags.append("geometry.bulk needs V_m3 > 0 or A_m2 > 0")

    if task == "continuum-check":
        if config.get("length_m", 0) <= 0:
            diags.append("length_m must be positive")
    return diags


# ---------------------------------------------------------------------------
# Task implementations


def _task_dispersion(config, out_dir, report):
    model = _medium(config)
    grid = _frequency_grid(config)
    rows = []
    worst_product = 0.0
    for w in grid:
        n = refractive_index(model, w)
        eps = permittivity(model, w)
        eta = inverse_permittivity(model, w)
        r = velocity_ratio_R(model, w)  # raises FormMismatch on bad derivatives
        vp = phase_velocity(model, w)
        vg = vp / r
        rows.append((w, n, eps, eta, r, vp, vg, propagation_constant(model, w)))
        worst_product = max(worst_product, abs(eps * eta - 1.0))
    _write_csv(out_dir / "dispersion.csv",
               "omega_rad_s,n,eps_F_per_m,eta_m_per_F,R,v_p_m_per_s,v_g_m_per_s,k_rad_per_m",
               rows)
    report.check("eps_times_eta_equals_1", worst_product, 1e-12)
    report.check("R_form_agreement", 0.0, 1.0)  # enforced inside velocity_ratio_R
    report.note(f"{len(rows)} frequencies written to dispersion.csv")


def _energy_tables(model, spec, report):
    er = energy_mod.stationary_energy_density(model, spec)
    total_eta = energy_mod.stationary_energy_density_eta(model, spec)
    scale = max(abs(er.W_total), abs(total_eta), 1e-300)
    report.check("eps_vs_eta_formulation", abs(er.W_total - total_eta) / scale, 1e-12)
    pf = er.per_frequency
    nz = pf[:, 2] != 0
    res = np.max(np.abs(pf[nz, 2] - pf[nz, 1] * pf[nz, 3]) / np.abs(pf[nz, 2]),
                 initial=0.0)
    report.check("flux_equals_density_times_vg", res, 1e-10)
    return er


def _task_energy(config, out_dir, report, base):
    model = _medium(config)
    spec = _spectrum(config, base)
    er = _energy_tables(model, spec, report)
    _write_csv(
        out_dir / "energy.csv",
        "# spectral integrals use the d(omega)/2pi convention\n"
        "omega_rad_s,density_J_per_m3_per_unit,flux_W_per_m2_per_unit,v_g_m_per_s",
        er.per_frequency,
    )
    _write_csv(out_dir / "energy_totals.csv",
               "W_E_J_per_m3,W_B_J_per_m3,W_total_J_per_m3,S_z_W_per_m2",
               [(er.W_E, er.W_B, er.W_total, er.S_z)])
    report.check("W_total_equals_WE_plus_WB",
                 abs(er.W_total - er.W_E - er.W_B) / abs(er.W_total), 1e-15)


def _task_flux_check(config, out_dir, report, base):
    model = _medium(config)
    spec = _spectrum(config, base)
    _energy_tables(model, spec, report)
    report.note("flux/density/velocity identities checked per frequency")


def _task_slab_curves(config, out_dir, report):
    model = _medium(config)
    d = float(config["geometry"]["slab"]["D_m"])
    guide = modes_mod.SlabGuide(d, model)
    grid = _frequency_grid(config)
    m_list = [int(m) for m in config.get("modes_m", [0, 1, 2, 3, 4])]

    def one_curve(m):
        if m == 0:
            mask = grid > 0
            beta = np.array([propagation_constant(model, w) for w in grid[mask]])
            return modes_mod.DispersionCurve(m=0, omega=grid[mask], beta=beta)
        return modes_mod.dispersion_curve(guide, m, grid[grid > 0])

    with ThreadPoolExecutor(max_workers=_max_workers()) as pool:
        curves = list(pool.map(one_curve, m_list))

    rows = [(w, b, str(c.m)) for c in curves for w, b in zip(c.omega, c.beta)]
    _write_csv(out_dir / "fig1.csv", "omega_rad_s,beta_rad_m,m", rows)
    _write_svg(out_dir / "fig1.svg",
               [(f"m={c.m}" + (" bulk" if c.m == 0 else ""), c.omega, c.beta)
                for c in curves])

    # guided curves must lie below the bulk line
    worst = 0.0
    for c in curves:
        if c.m == 0:
            continue
        bulk = np.array([propagation_constant(model, w) for w in c.omega])
        worst = max(worst, float(np.max(c.beta - bulk, initial=-np.inf)))
    report.check("guided_curves_below_bulk_line", max(worst, 0.0), 0.0)

    cutoffs = [modes_mod.slab_cutoff(guide, m) for m in m_list if m >= 1]
    ordered = all(a < b for a, b in zip(cutoffs, cutoffs[1:]))
    report.check("cutoffs_increase_with_m", 0.0 if ordered else 1.0, 0.0)
    report.note("cutoffs_rad_s=" + ";".join(_fmt(c) for c in cutoffs))


def _task_fd_modes(config, out_dir, report):
    profile = _profile(config)
    omega = float(config["omega_rad_s"])
    count = int(config.get("count", 4))
    solved = modes_mod.fd_transverse_modes(profile, omega, count)

    x = profile.axes[0]
    header = "x_m," + ",".join(f"field_rank{m.rank}" for m in solved)
    rows = [tuple([xi] + [m.field.ravel()[i] for m in solved])
            for i, xi in enumerate(x)]
    _write_csv(out_dir / "fd_modes.csv", header, rows)
    sidecar = [{
        "rank": m.rank, "omega_rad_s": m.omega, "beta_rad_m": m.beta,
        "beta_sq_rad2_m2": m.beta_sq, "guided": m.guided, "residual": m.residual,
    } for m in solved]
    (out_dir / "fd_modes.json").write_text(json.dumps(sidecar, indent=2) + "\n")
    report.check("eigen_residual", max(m.residual for m in solved), 1e-8)


def _task_quantize(config, out_dir, report):
    model = _medium(config)
    geom = config["geometry"]["bulk"]
    volume = float(geom.get("V_m3", 0.0))
    area = float(geom.get("A_m2", 0.0))
    grid = _frequency_grid(config)

    rows = []
    worst_const = 0.0
    for w in grid:
        eps = permittivity(model, w)
        if volume > 0:
            fc = quant_mod.field_coefficients_discrete(w, model, volume)
            rows.append((w, fc.c_D, fc.c_E, fc.c_B, fc.labeling, fc.extent))
            worst_const = max(worst_const, abs(fc.c_D / (eps * fc.c_E) - 1.0))
        if area > 0:
            fb = quant_mod.field_coefficients_beta(w, model, area)
            fo = quant_mod.field_coefficients_omega(w, model, area)
            rows.append((w, fb.c_D, fb.c_E, fb.c_B, fb.labeling, fb.extent))
            rows.append((w, fo.c_D, fo.c_E, fo.c_B, fo.labeling, fo.extent))
            worst_const = max(worst_const, abs(fb.c_D / (eps * fb.c_E) - 1.0),
                              abs(fo.c_D / (eps * fo.c_E) - 1.0))
    _write_csv(out_dir / "coefficients.csv",
               "omega_rad_s,c_D_C_per_m2,c_E_V_per_m,c_B_T,labeling,V_or_A", rows)
    report.check("c_D_equals_eps_times_c_E", worst_const, 1e-12)
    report.note("per-omega kernels verified against per-beta/sqrt(v_g) on evaluation")


def _task_projector_demo(config, out_dir, report):
    profile = _profile(config)
    omega = float(config["omega_rad_s"])
    count = int(config.get("count", 2))
    solved = modes_mod.fd_transverse_modes(profile, omega, count)
    normalized = [quant_mod.normalize_mode(m, profile) for m in solved]
    alphas = np.array([1.0 + 0.0j, 0.5 + 0.25j] + [0.2] * (count - 2))[:count]
    snapshot = sum(a * quant_mod.displacement_field(nm)
                   for a, nm in zip(alphas, normalized))
    rows, worst = [], 0.0
    for a, nm in zip(alphas, normalized):
        rec = quant_mod.approx_project(snapshot, nm, profile)
        err = abs(rec - a)
        worst = max(worst, err)
        rows.append((nm.omega, a.real, a.imag, rec.real, rec.imag, err))
    _write_csv(out_dir / "projector.csv",
               "omega_rad_s,alpha_re,alpha_im,recovered_re,recovered_im,abs_error",
               rows)
    report.check("projector_recovery", worst, 1e-8)


def _task_continuum_check(config, out_dir, report):
    length = float(config["length_m"])
    beta_lo = float(config.get("beta_lo_rad_m", 1e6))
    beta_hi = float(config.get("beta_hi_rad_m", 2e6))
    spacing = 2 * math.pi / length
    grid = np.arange(beta_lo, beta_hi, spacing)
    center = 0.5 * (beta_lo + beta_hi)
    width = 0.1 * (beta_hi - beta_lo)
    f = lambda b: math.exp(-0.5 * ((b - center) / width) ** 2)
    rep = quant_mod.continuum_commutator_check(length, grid, test_fn=f)
    rep2 = quant_mod.continuum_commutator_check(
        2 * length, np.arange(beta_lo, beta_hi, spacing / 2), test_fn=f)
    report.check("sum_to_integral_identity", rep.sum_identity_residual, 1e-12)
    report.check("delta_weight_error_halves_under_L_doubling",
                 rep2.delta_error / max(rep.delta_error, 1e-300), 0.75)
    if "medium" in config:
        model = _medium(config)
        lo, hi = config["jacobian_window_rad_s"]
        res = quant_mod.omega_relabel_jacobian_residual(
            model, float(lo), float(hi),
            lambda w: math.exp(-((w - 0.5 * (lo + hi)) / (0.2 * (hi - lo))) ** 2))
        report.check("omega_relabel_jacobian", res, 1e-10)
    _write_csv(out_dir / "continuum.csv",
               "L_m,spacing_rad_m,sum_identity_residual,delta_error",
               [(rep.length, rep.spacing, rep.sum_identity_residual, rep.delta_error),
                (rep2.length, rep2.spacing, rep2.sum_identity_residual, rep2.delta_error)])


# ---------------------------------------------------------------------------
# Entry point


def run(config: dict, out_dir: Path, base: Path = Path(".")) -> int:
    """Execute one task; returns the process exit status."""
    diags = validate(config, base)
    if diags:
        for d in diags:
            print(f"config error: {d}", file=sys.stderr)
        return 2
    out_dir.mkdir(parents=True, exist_ok=True)
    report = Report()
    task = config["task"]
    try:
        if task == "dispersion":
            _task_dispersion(config, out_dir, report)
        elif task == "energy":
            _task_energy(config, out_dir, report, base)
        elif task == "flux-check":
            _task_flux_check(config, out_dir, report, base)
        elif task == "slab-curves":
            _task_slab_curves(config, out_dir, report)
        elif task == "fd-modes":
            _task_fd_modes(config, out_dir, report)
        elif task == "quantize":
            _task_quantize(config, out_dir, report)
        elif task == "projector-demo":
            _task_projector_demo(config, out_dir, report)
        elif task == "continuum-check":
            _task_continuum_check(config, out_dir, report)
    except (PolaritonError, AssertionError) as exc:
        report.lines.append(f"FAIL {task} aborted: {exc}")
        report.failed.append(task)
    report.write(out_dir)
    if report.failed:
        print("failed checks: " + ", ".join(report.failed), file=sys.stderr)
        return 3
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="polariton",
        description="dispersive-dielectric mode and quantization toolbox",
    )
    parser.add_argument("task", choices=TASKS)
    parser.add_argument("--config", required=True, type=Path)
    parser.add_argument("--out", type=Path, default=Path("."))
    args = parser.parse_args(argv)

    try:
        config = json.loads(args.config.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if not isinstance(config, dict):
        print("config error: top-level JSON object required", file=sys.stderr)
        return 2
    if "task" in config and config["task"] != args.task:
        print(f"config error: config task {config['task']!r} != CLI task "
              f"{args.task!r}", file=sys.stderr)
        return 2
    config["task"] = args.task
    return run(config, args.out, base=args.config.parent)


if __name__ == "__main__":
    sys.exit(main())
