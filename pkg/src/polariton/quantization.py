"""Dispersion-weighted normalization and quantized-field coefficient assembly.

The mode solvers deliver raw transverse fields; this layer turns them into
normalized quantum modes and c-number coefficient functions:

* the band weight function rho(r) = eps0 * eta(r) * R(r) that makes
  in-band modes orthonormal in the Sturm-Liouville sense;
* mode normalization so that the dispersion-weighted norm integral is 1
  (equivalently the displacement-field norm equals hbar*omega/2);
* the nonorthogonality bracket of dispersive structured media and its
  nondispersive collapse to a plain eta weighting;
* the approximate projector recovering mode amplitudes from a field
  snapshot within one band;
* per-mode amplitude factors for the D, E and B fields in the discrete
  (1/sqrt(V)), per-beta (1/sqrt(A)) and per-omega labelings, plus the
  sum-to-integral bookkeeping of the continuum limit.

Nothing here simulates operator algebra: every quantum statement is
realized as a coefficient-function identity or a measure-preserving
quadrature check. The mode normalization constant is fixed to hbar*omega
(no alternative normalizations are exposed), and the conventional factor
of i multiplying the displacement modes is carried as a documented phase
convention, not stored in the arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .constants import C, EPS0, HBAR, MU0
from .dispersion import (
    DispersionModel,
    group_velocity,
    inverse_permittivity,
    propagation_constant,
    refractive_index,
    velocity_ratio_R,
)
from .errors import (
    BandMismatch,
    GridMismatch,
    GridNotUniform,
    GridTooCoarse,
    ZeroNorm,
)
from .modes import DiscreteMode, IndexProfile

__all__ = [
    "WeightFunction",
    "BandSpec",
    "NormalizedMode",
    "FieldCoefficients",
    "ModeAmplitude",
    "weight_function",
    "normalize_mode",
    "plane_wave_mode",
    "displacement_field",
    "nonorthogonality_bracket",
    "plain_weighted_overlap",
    "approx_project",
    "field_coefficients_discrete",
    "field_coefficients_beta",
    "field_coefficients_omega",
    "continuum_commutator_check",
    "omega_relabel_jacobian_residual",
    "magnetic_mode",
    "electric_from_magnetic",
    "poynting_per_photon_assembled",
    "hamiltonian_diagonal",
]

_NEAR_DIAGONAL_RTOL = 1e-9


# ---------------------------------------------------------------------------
# Weight function and bands


@dataclass(frozen=True)
class BandSpec:
    """Isolated frequency band centered at omega_center (rad/s)."""

    label: int
    omega_center: float
    omega_range: tuple[float, float]

    def __post_init__(self):
        lo, hi = self.omega_range
        if not (lo < self.omega_center < hi):
            raise ValueError("band center must lie inside its range")


def check_bands_disjoint(bands) -> None:
    spans = sorted(b.omega_range for b in bands)
    for (_, hi), (lo, _) in zip(spans, spans[1:]):
        if lo < hi:
            raise ValueError("band ranges overlap; bands must be pairwise disjoint")


@dataclass(frozen=True)
class WeightFunction:
    """rho(r) = eps0 * eta(r, omega_center) * R(r, omega_center), dimensionless."""

    values: np.ndarray
    omega_center: float


def weight_function(profile: IndexProfile, omega_bar: float) -> WeightFunction:
    """Band weight rho = eps0*eta*R at the band center, per grid point.

    Equals eps0*(eta - (omega/2) d_eta/d_omega) by the velocity-ratio
    algebra; rho = 1 in vacuum regions.
    """
    profile.require_in_window(omega_bar)
    vals = profile.map_models(
        lambda m: EPS0 * inverse_permittivity(m, omega_bar) * velocity_ratio_R(m, omega_bar)
    )
    return WeightFunction(values=vals, omega_center=omega_bar)


# ---------------------------------------------------------------------------
# Normalized modes


@dataclass(frozen=True)
class NormalizedMode:
    """A mode rescaled so that int eps0*eta*R*|u|^2 = 1.

    u is the normalized electric-like mode profile sampled on the
    profile's grid; the displacement profile is D = sqrt(eps0*hbar*omega/2)*u
    (times the conventional phase factor i, which is not stored).
    M is the normalization constant, fixed to hbar*omega.
    """

    omega: float
    beta: float
    u: np.ndarray
    M: float
    band: BandSpec | None = None
    base: DiscreteMode | None = None


def _grid_integral(values: np.ndarray, profile: IndexProfile) -> complex:
    # Dirichlet boundaries: the field vanishes on the box edge, so the
    # trapezoid over the full domain reduces to cell * sum over interior.
    return values.sum() * profile.cell_measure


def displacement_field(mode: NormalizedMode) -> np.ndarray:
    """|D_j(r)| samples, sqrt(eps0*hbar*omega/2) * u_j(r)."""
    return math.sqrt(EPS0 * HBAR * mode.omega / 2.0) * mode.u


def normalize_mode(mode, profile: IndexProfile, omega_j: float | None = None,
                   band: BandSpec | None = None) -> NormalizedMode:
    """Normalize a solved mode against the dispersion weight eps0*eta*R.

    Accepts a DiscreteMode (whose solver field is an electric-like profile;
    the displacement profile acquires a factor n^2(r, omega)) or an
    already-normalized mode, in which case the second pass rescales by 1.
    The equivalent displacement normalization int eta*R*|D|^2 = hbar*omega/2
    then holds with M = hbar*omega.
    """
    if isinstance(mode, NormalizedMode):
        omega = omega_j if omega_j is not None else mode.omega
        u_raw = mode.u
        beta = mode.beta
        base = mode.base
    elif isinstance(mode, DiscreteMode):
        omega = omega_j if omega_j is not None else mode.omega
        # solver fields are electric-like; the displacement profile carries
        # the relative permittivity n^2(r, omega)
        u_raw = profile.map_models(lambda m: refractive_index(m, omega) ** 2) * mode.field
        beta = mode.beta
        base = mode
    else:
        raise TypeError(f"cannot normalize {type(mode).__name__}")

    rho = weight_function(profile, omega).values
    norm_sq = _grid_integral(rho * np.abs(u_raw) ** 2, profile)
    if norm_sq <= 0 or not np.isfinite(norm_sq):
        raise ZeroNorm(f"degenerate mode field: weighted norm^2 = {norm_sq!r}")
    return NormalizedMode(
        omega=omega,
        beta=beta,
        u=u_raw / math.sqrt(norm_sq),
        M=HBAR * omega,
        band=band,
        base=base,
    )


def plane_wave_amplitude(model: DispersionModel, omega: float, volume: float) -> float:
    """Scalar amplitude of a normalized plane-wave mode: 1/sqrt(eps0*eta*R*V).

    The full mode is u(r) = e * amplitude * exp(i k.r); the weighted norm
    integral over the quantization volume is then exactly 1.
    """
    if volume <= 0:
        raise ValueError("quantization volume must be positive")
    eta = inverse_permittivity(model, omega)
    r = velocity_ratio_R(model, omega)
    return 1.0 / math.sqrt(EPS0 * eta * r * volume)


def plane_wave_mode(model: DispersionModel, omega: float, volume: float,
                    n_samples: int = 256) -> NormalizedMode:
    """Normalized plane-wave mode sampled along one wavelength of z."""
    amp = plane_wave_amplitude(model, omega, volume)
    k = propagation_constant(model, omega)
    z = np.linspace(0.0, 2.0 * math.pi / k, n_samples, endpoint=False)
    return NormalizedMode(
        omega=omega, beta=k, u=amp * np.exp(1j * k * z), M=HBAR * omega,
    )


# ---------------------------------------------------------------------------
# Nonorthogonality diagnostics and projection


def _displacement_samples(mode: NormalizedMode, profile: IndexProfile,
                          ) -> np.ndarray:
    if mode.u.shape != profile.shape:
        raise GridMismatch(
            f"mode grid {mode.u.shape} does not match profile grid {profile.shape}"
        )
    return displacement_field(mode)


def nonorthogonality_bracket(omega_j: float, d_j: np.ndarray,
                             omega_l: float, d_l: np.ndarray,
                             profile: IndexProfile) -> complex:
    """The frequency-pair overlap integral of two displacement fields, in J.

    Evaluates int D_l^* . D_j * { (w_l/w_j) eta(r, w_j)
    + [w_j eta(r, w_l) - w_l eta(r, w_j)] / (w_j - w_l) } d^3r.

    For exact eigenmodes of the same structure with w_j != w_l this
    vanishes; at coincident frequencies the bracket tends to 2*eta*R (the
    normalization weight); for a dispersionless profile it collapses to a
    plain eta(r) weighting.
    """
    if d_j.shape != profile.shape or d_l.shape != profile.shape:
        raise GridMismatch("fields must be sampled on the profile grid")
    eta_j = profile.map_models(lambda m: inverse_permittivity(m, omega_j))
    if abs(omega_j - omega_l) < _NEAR_DIAGONAL_RTOL * max(omega_j, omega_l):
        r_j = profile.map_models(lambda m: velocity_ratio_R(m, omega_j))
        bracket = 2.0 * eta_j * r_j
    else:
        eta_l = profile.map_models(lambda m: inverse_permittivity(m, omega_l))
        bracket = (omega_l / omega_j) * eta_j + \
            (omega_j * eta_l - omega_l * eta_j) / (omega_j - omega_l)
    integrand = np.conj(d_l) * d_j * bracket
    return complex(_grid_integral(integrand, profile))


def plain_weighted_overlap(mode_j: NormalizedMode, mode_l: NormalizedMode,
                           profile: IndexProfile,
                           omega_bar: float | None = None) -> complex:
    """rho-weighted overlap int rho(omega_bar) u_l^* . u_j d^3r.

    Diagonal entries are 1 by normalization; off-diagonal entries within a
    band are bounded by the band's dispersion spread. omega_bar defaults
    to the common band center.
    """
    if mode_j.band is not None and mode_l.band is not None:
        if mode_j.band.label != mode_l.band.label:
            raise BandMismatch(
                f"modes from bands {mode_j.band.label} and {mode_l.band.label}"
            )
    if omega_bar is None:
        if mode_j.band is None:
            raise ValueError("omega_bar required when modes carry no band")
        omega_bar = mode_j.band.omega_center
    if mode_j.u.shape != mode_l.u.shape:
        raise GridMismatch("modes sampled on different grids")
    rho = weight_function(profile, omega_bar).values
    return complex(_grid_integral(rho * np.conj(mode_l.u) * mode_j.u, profile))


def approx_project(snapshot_d: np.ndarray, mode_l: NormalizedMode,
                   profile: IndexProfile) -> complex:
    """Recover the amplitude of mode l from a displacement-field snapshot.

    Returns (2/hbar*omega_l) int eta(r, w_l) R(r, w_l) D_l^* . D(r) d^3r,
    which approximates alpha_l * exp(-i w_l t) for a snapshot built from a
    superposition within one weakly dispersive band. Accuracy degrades
    gracefully with dispersion strength (no error raised).
    """
    d_l = _displacement_samples(mode_l, profile)
    if snapshot_d.shape != profile.shape:
        raise GridMismatch("snapshot must be sampled on the profile grid")
    eta = profile.map_models(lambda m: inverse_permittivity(m, mode_l.omega))
    r = profile.map_models(lambda m: velocity_ratio_R(m, mode_l.omega))
    integral = _grid_integral(eta * r * np.conj(d_l) * snapshot_d, profile)
    return 2.0 * integral / (HBAR * mode_l.omega)


# ---------------------------------------------------------------------------
# Field coefficient functions


@dataclass(frozen=True)
class FieldCoefficients:
    """Per-mode c-number amplitude factors of the quantized D, E, B fields.

    labeling is "discrete" (per-mode, 1/sqrt(V)), "per-beta" (continuum
    kernel, 1/sqrt(A)) or "per-omega" (after the Jacobian rescaling).
    c_D = eps * c_E holds pointwise; in vacuum c_E reduces to the standard
    sqrt(hbar*omega/(2 eps0 V)).
    """

    omega: float
    c_D: float
    c_E: float
    c_B: float
    labeling: str
    extent: float  # V in m^3 (discrete) or A in m^2 (continuum labelings)


def _coefficients(omega, model, extent, labeling, with_vg):
    if extent <= 0:
        raise ValueError("quantization volume/area must be positive")
    n = refractive_index(model, omega)
    vg = group_velocity(model, omega) if with_vg else 1.0
    c_d = math.sqrt(EPS0 * HBAR * omega * vg * n**3 / (2.0 * C * extent))
    c_e = math.sqrt(HBAR * omega * vg / (2.0 * EPS0 * n * C * extent))
    c_b = (n / C) * c_e
    return FieldCoefficients(omega=omega, c_D=c_d, c_E=c_e, c_B=c_b,
                             labeling=labeling, extent=extent)


def field_coefficients_discrete(omega: float, model: DispersionModel,
                                volume: float) -> FieldCoefficients:
    """Discrete-mode coefficients: c_E = sqrt(hbar*omega*v_g/(2 eps0 n c V)),
    c_D = eps * c_E, c_B = (n/c) * c_E."""
    return _coefficients(omega, model, volume, "discrete", with_vg=True)


def field_coefficients_beta(omega: float, model: DispersionModel,
                            area: float) -> FieldCoefficients:
    """Per-beta continuum kernels (1/sqrt(A)); the quantization length has
    already cancelled, so no L parameter exists."""
    return _coefficients(omega, model, area, "per-beta", with_vg=True)


def field_coefficients_omega(omega: float, model: DispersionModel,
                             area: float) -> FieldCoefficients:
    """Per-omega kernels after the sqrt(d beta/d omega) operator rescaling.

    The group velocity cancels out of these kernels; the cancellation is
    verified numerically against the per-beta kernels on every call.
    """
    fc = _coefficients(omega, model, area, "per-omega", with_vg=False)
    fb = field_coefficients_beta(omega, model, area)
    root_vg = math.sqrt(group_velocity(model, omega))
    for got, expect in ((fc.c_D, fb.c_D / root_vg), (fc.c_E, fb.c_E / root_vg),
                       (fc.c_B, fb.c_B / root_vg)):
        if abs(got - expect) > 1e-12 * abs(expect):
            raise AssertionError(
                "group-velocity cancellation failed: per-omega kernel "
                f"{got!r} vs per-beta/sqrt(v_g) {expect!r}"
            )
    return fc


# ---------------------------------------------------------------------------
# Continuum-limit bookkeeping


@dataclass(frozen=True)
class ContinuumCheckReport:
    """Quadrature realizations of the discrete-to-continuum rescaling."""

    length: float
    spacing: float
    sum_identity_residual: float   # |delta_beta * L/(2 pi) - 1|, exact at any L
    delta_error: float             # off-grid delta-weight sampling error, O(1/L)


def continuum_commutator_check(length: float, beta_grid,
                               test_fn=None, beta0: float | None = None,
                               ) -> ContinuumCheckReport:
    """Verify the sum-to-integral rescaling as c-number quadrature identities.

    The grid must be uniform with spacing 2*pi/length (periodic boundary
    spacing). The Kronecker-to-Dirac replacement makes
    delta_beta * L/(2 pi) = 1 exactly at any finite L; sampling a test
    function against the discretized delta-weight at an off-grid point
    beta0 incurs an error that decays as O(1/L).
    """
    beta_grid = np.asarray(beta_grid, dtype=float)
    steps = np.diff(beta_grid)
    if beta_grid.size < 2 or not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        raise GridNotUniform("beta grid must be uniform")
    expected = 2.0 * math.pi / length
    if abs(float(steps[0]) - expected) > 1e-9 * expected:
        raise GridNotUniform(
            f"grid spacing {float(steps[0])!r} != 2*pi/L = {expected!r}"
        )
    # The identity holds for the defining spacing 2*pi/L; the measured
    # diff above only validates the grid (large-beta cancellation noise
    # must not pollute the residual).
    spacing = expected
    sum_identity_residual = abs(spacing * length / (2.0 * math.pi) - 1.0)

    delta_error = 0.0
    if test_fn is not None:
        if beta0 is None:
            beta0 = float(beta_grid[0] + 0.37 * (beta_grid[-1] - beta_grid[0]))
        # Discretized Dirac weight: Kronecker/delta_beta at the nearest node.
        nearest = beta_grid[np.argmin(np.abs(beta_grid - beta0))]
        delta_error = abs(test_fn(nearest) - test_fn(beta0))
    return ContinuumCheckReport(
        length=length, spacing=spacing,
        sum_identity_residual=sum_identity_residual, delta_error=delta_error,
    )


def omega_relabel_jacobian_residual(model: DispersionModel, omega_lo: float,
                                    omega_hi: float, test_fn) -> float:
    """Relative mismatch between the beta-measure and omega-measure integrals.

    Computes int f(omega(beta)) d beta two ways: adaptive quadrature in
    beta (inverting the bulk dispersion relation numerically at each node)
    and adaptive quadrature in omega with the Jacobian d beta/d omega
    = 1/v_g. Agreement confirms 1/v_g as the measure-preserving weight.
    """
    beta_lo = propagation_constant(model, omega_lo)
    beta_hi = propagation_constant(model, omega_hi)

    def omega_of_beta(beta):
        return brentq(lambda w: propagation_constant(model, w) - beta,
                      omega_lo * (1 - 1e-9), omega_hi * (1 + 1e-9),
                      xtol=1e-3, rtol=8.9e-16)

    i_beta, _ = quad(lambda b: test_fn(omega_of_beta(b)), beta_lo, beta_hi,
                     epsabs=0.0, epsrel=1e-12, limit=200)
    i_omega, _ = quad(lambda w: test_fn(w) / group_velocity(model, w),
                      omega_lo, omega_hi, epsabs=0.0, epsrel=1e-12, limit=200)
    return abs(i_beta - i_omega) / max(abs(i_beta), abs(i_omega))


# ---------------------------------------------------------------------------
# Magnetic modes (discrete curl on a longitudinal grid)


def _check_curl_grid(z, eta_rel_max_n, omega):
    h = float(z[1] - z[0])
    if not np.allclose(np.diff(z), h, rtol=1e-9, atol=0.0):
        raise GridNotUniform("curl evaluation needs a uniform z grid")
    lam_medium = 2.0 * math.pi * C / (omega * eta_rel_max_n)
    if h > lam_medium / 50.0:
        raise GridTooCoarse(
            f"h = {h:.3e} m exceeds lambda/50 = {lam_medium / 50:.3e} m"
        )
    return h


def magnetic_mode(z: np.ndarray, u: np.ndarray, eta: np.ndarray,
                  omega: float) -> np.ndarray:
    """Magnetic mode from a transverse electric-like mode on a z grid.

    u has shape (N, 2): the (x, y) components of a transversely uniform
    mode sampled along z. Returns u_tilde = (c/(i omega)) curl(eps0*eta*u)
    with the curl taken by second-order differences (np.gradient).
    eta is the inverse permittivity per sample, in m/F.
    """
    u = np.asarray(u)
    eta = np.asarray(eta, dtype=float)
    if u.ndim != 2 or u.shape[1] != 2 or u.shape[0] != z.size:
        raise GridMismatch("u must have shape (len(z), 2)")
    n_max = float(np.max(1.0 / np.sqrt(EPS0 * eta)))
    _check_curl_grid(z, n_max, omega)
    fx = EPS0 * eta * u[:, 0]
    fy = EPS0 * eta * u[:, 1]
    # curl of (fx(z), fy(z), 0) = (-dfy/dz, dfx/dz, 0)
    curl_x = -np.gradient(fy, z)
    curl_y = np.gradient(fx, z)
    return (C / (1j * omega)) * np.stack([curl_x, curl_y], axis=1)


def electric_from_magnetic(z: np.ndarray, u_tilde: np.ndarray,
                           omega: float) -> np.ndarray:
    """Inverse relation u = (i c/omega) curl(u_tilde), closing the loop O(h^2)."""
    u_tilde = np.asarray(u_tilde)
    if u_tilde.ndim != 2 or u_tilde.shape[1] != 2 or u_tilde.shape[0] != z.size:
        raise GridMismatch("u_tilde must have shape (len(z), 2)")
    curl_x = -np.gradient(u_tilde[:, 1], z)
    curl_y = np.gradient(u_tilde[:, 0], z)
    return (1j * C / omega) * np.stack([curl_x, curl_y], axis=1)


# ---------------------------------------------------------------------------
# Cross-checks against the energy module


def poynting_per_photon_assembled(omega: float, model: DispersionModel,
                                  volume: float, n_photons: int = 1) -> float:
    """Cycle-averaged Poynting flux of one plane-wave mode, assembled from
    the field coefficients.

    Builds the four surviving E x B cross terms from c_E and c_B, drops the
    vacuum piece, and returns n*hbar*omega*v_g/V. Must agree with the
    energy module's photon flux to machine precision.
    """
    fc = field_coefficients_discrete(omega, model, volume)
    cross = fc.c_E * fc.c_B / MU0
    # terms 1 and 2 carry <a^dag a> = n; terms 3 and 4 carry <a a^dag> = n + 1,
    # whose vacuum unit is dropped.
    return 0.5 * cross * n_photons * 2 + 0.5 * cross * n_photons * 2


# ---------------------------------------------------------------------------
# Classical amplitudes and energy bookkeeping


@dataclass(frozen=True)
class ModeAmplitude:
    """Classical amplitude alpha with quadratures alpha = (Q + iP)/sqrt(2 hbar)."""

    alpha: complex

    @property
    def Q(self) -> float:
        return self.alpha.real * math.sqrt(2.0 * HBAR)

    @property
    def P(self) -> float:
        return self.alpha.imag * math.sqrt(2.0 * HBAR)

    @classmethod
    def from_quadratures(cls, q: float, p: float) -> "ModeAmplitude":
        return cls(alpha=(q + 1j * p) / math.sqrt(2.0 * HBAR))

    def energy(self, omega: float) -> float:
        """Mode energy contribution hbar*omega*|alpha|^2."""
        return HBAR * omega * abs(self.alpha) ** 2


def hamiltonian_diagonal(amplitudes, modes, profile: IndexProfile) -> float:
    """Diagonal of the classical double-sum Hamiltonian by grid quadrature.

    Sum over modes of |alpha_j|^2 * 2 * int eta_j R_j |D_j|^2; with
    normalized modes this reproduces sum hbar*omega_j*|alpha_j|^2 up to the
    quadrature/normalization residuals.
    """
    total = 0.0
    for amp, mode in zip(amplitudes, modes):
        d_j = _displacement_samples(mode, profile)
        eta = profile.map_models(lambda m: inverse_permittivity(m, mode.omega))
        r = profile.map_models(lambda m: velocity_ratio_R(m, mode.omega))
        m_j = 2.0 * _grid_integral(eta * r * np.abs(d_j) ** 2, profile)
        total += abs(amp.alpha if isinstance(amp, ModeAmplitude) else amp) ** 2 * m_j
    return float(total)
