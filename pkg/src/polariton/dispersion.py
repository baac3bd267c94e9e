"""Scalar material-dispersion models and derived frequency-local quantities.

A model carries n(omega) for a transparent medium inside an explicit
validity window (evaluation outside is a hard error, never extrapolation)
together with its analytic or numeric frequency derivative. From those two
primitives everything else follows: permittivity eps = eps0*n^2, inverse
permittivity eta = 1/eps, phase and group velocity, the propagation
constant k = omega*n/c, and the velocity ratio R = v_p/v_g that acts as
the dispersion weight in energy densities and mode normalization.

The velocity ratio is evaluated through four algebraically equivalent
forms routed through different derivatives (d_eta/d_omega, d(1/n^2)/d_omega,
dn/d_omega); their mutual agreement is asserted on every call, so a broken
derivative implementation cannot go unnoticed.

All functions are pure; models are immutable after construction and safe
to share across threads.

Units: SI throughout. omega in rad/s, lengths in m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .constants import C, EPS0
from .errors import FormMismatch, NonPhysical, OutOfWindow

__all__ = [
    "DispersionModel",
    "ConstantIndex",
    "Sellmeier",
    "Tabulated",
    "LinearIndex",
    "model_from_dict",
    "refractive_index",
    "permittivity",
    "inverse_permittivity",
    "d_eta_domega",
    "velocity_ratio_R",
    "phase_velocity",
    "group_velocity",
    "propagation_constant",
]

# Relative agreement demanded between the four velocity-ratio forms.
_R_TOL_ANALYTIC = 1e-10
_R_TOL_TABULATED = 1e-5


def _fd_step(omega: float) -> float:
    """Central-difference step: relative 1e-6 with an absolute floor."""
    return max(1e-6 * omega, 1e6)


class DispersionModel:
    """Base class: n(omega) on an explicit validity window."""

    window: tuple[float, float]

    def n(self, omega: float) -> float:
        raise NotImplementedError

    def dn_domega(self, omega: float) -> float:
        raise NotImplementedError

    @property
    def analytic(self) -> bool:
        """True if dn_domega is closed-form (tighter tolerances apply)."""
        return True

    def require_in_window(self, omega: float) -> None:
        lo, hi = self.window
        if not (omega > 0 and lo <= omega <= hi):
            raise OutOfWindow(omega, self.window)

    # -- derivatives of derived quantities ---------------------------------
    # Analytic models chain through dn_domega; Tabulated overrides these
    # with direct finite differences so the four R-forms stay independent.

    def d_eta_domega(self, omega: float) -> float:
        """d(eta)/d(omega) with eta = 1/(eps0 n^2)."""
        n = self.n(omega)
        return -2.0 * self.dn_domega(omega) / (EPS0 * n**3)

    def d_inv_n2_domega(self, omega: float) -> float:
        """d(1/n^2)/d(omega)."""
        n = self.n(omega)
        return -2.0 * self.dn_domega(omega) / n**3


@dataclass(frozen=True)
class ConstantIndex(DispersionModel):
    """Dispersionless medium with a fixed refractive index."""

    n0: float
    window: tuple[float, float] = (0.0, math.inf)

    def __post_init__(self):
        if self.n0 <= 0:
            raise NonPhysical(f"constant index must be positive, got {self.n0}")

    def n(self, omega):
        return self.n0

    def dn_domega(self, omega):
        return 0.0

    def d_eta_domega(self, omega):
        return 0.0

    def d_inv_n2_domega(self, omega):
        return 0.0


@dataclass(frozen=True)
class Sellmeier(DispersionModel):
    """Sellmeier model n^2(lam) = 1 + sum_i B_i lam^2 / (lam^2 - lam_i^2).

    Parameterized in vacuum wavelength (industry convention) but evaluated
    at lam = 2*pi*c/omega; the omega-derivative is obtained analytically by
    the chain rule through lam(omega), avoiding finite-difference noise.

    terms: list of (B_i dimensionless, lam_i^2 in m^2).
    """

    terms: tuple[tuple[float, float], ...]
    window: tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(tuple(t) for t in self.terms))

    def _n2(self, lam: float) -> float:
        lam2 = lam * lam
        return 1.0 + sum(b * lam2 / (lam2 - l2) for b, l2 in self.terms)

    def n(self, omega):
        self.require_in_window(omega)
        lam = 2.0 * math.pi * C / omega
        n2 = self._n2(lam)
        if n2 <= 0:
            raise NonPhysical(f"n^2 = {n2:.6e} <= 0 at omega = {omega:.6e} rad/s")
        return math.sqrt(n2)

    def dn_domega(self, omega):
        # d(n^2)/dlam = sum -2 B lam lam_i^2 / (lam^2 - lam_i^2)^2,
        # dlam/domega = -lam/omega, dn/domega = d(n^2)/domega / (2n).
        self.require_in_window(omega)
        lam = 2.0 * math.pi * C / omega
        lam2 = lam * lam
        dn2_dlam = sum(-2.0 * b * lam * l2 / (lam2 - l2) ** 2 for b, l2 in self.terms)
        dn2_domega = dn2_dlam * (-lam / omega)
        return dn2_domega / (2.0 * self.n(omega))


@dataclass(frozen=True)
class LinearIndex(DispersionModel):
    """Synthetic model n(omega) = n_ref + slope*(omega - omega_ref).

    At omega_ref the index is n_ref regardless of slope, so the slope can
    be swept while holding the index fixed; used to probe how quantities
    depend on dn/domega in isolation.
    """

    n_ref: float
    slope: float
    omega_ref: float
    window: tuple[float, float]

    def n(self, omega):
        self.require_in_window(omega)
        n = self.n_ref + self.slope * (omega - self.omega_ref)
        if n <= 0:
            raise NonPhysical(f"n = {n:.6e} <= 0 at omega = {omega:.6e} rad/s")
        return n

    def dn_domega(self, omega):
        self.require_in_window(omega)
        return self.slope


@dataclass(frozen=True)
class Tabulated(DispersionModel):
    """Tabulated n(omega), cubic interpolation with natural boundaries.

    samples: sorted (omega, n) pairs, strictly increasing in omega, at
    least 4 points. The validity window is the sampled range. Derivatives
    are central finite differences with step max(1e-6*omega, 1e6 rad/s);
    a step that leaves the window is an error.
    """

    samples: tuple[tuple[float, float], ...]
    _spline: CubicSpline = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pts = tuple(tuple(s) for s in self.samples)
        if len(pts) < 4:
            raise ValueError("Tabulated model needs at least 4 samples")
        om = np.array([p[0] for p in pts])
        nn = np.array([p[1] for p in pts])
        if np.any(np.diff(om) <= 0):
            raise ValueError("Tabulated samples must be strictly increasing in omega")
        if np.any(nn <= 0):
            raise NonPhysical("tabulated refractive index must be positive")
        object.__setattr__(self, "samples", pts)
        object.__setattr__(self, "_spline", CubicSpline(om, nn, bc_type="natural"))

    @property
    def window(self):
        return (self.samples[0][0], self.samples[-1][0])

    @property
    def analytic(self):
        return False

    def n(self, omega):
        self.require_in_window(omega)
        n = float(self._spline(omega))
        if n <= 0:
            raise NonPhysical(f"n = {n:.6e} <= 0 at omega = {omega:.6e} rad/s")
        return n

    def _central(self, f, omega):
        h = _fd_step(omega)
        lo, hi = self.window
        if omega - h < lo or omega + h > hi:
            raise OutOfWindow(omega, (lo + h, hi - h))
        return (f(omega + h) - f(omega - h)) / (2.0 * h)

    def dn_domega(self, omega):
        return self._central(self.n, omega)

    def d_eta_domega(self, omega):
        return self._central(lambda w: 1.0 / (EPS0 * self.n(w) ** 2), omega)

    def d_inv_n2_domega(self, omega):
        return self._central(lambda w: 1.0 / self.n(w) ** 2, omega)


# ---------------------------------------------------------------------------
# Operations


def refractive_index(model: DispersionModel, omega: float) -> float:
    """n(omega); raises OutOfWindow / NonPhysical."""
    model.require_in_window(omega)
    return model.n(omega)


def permittivity(model: DispersionModel, omega: float) -> float:
    """eps(omega) = eps0 * n^2, in F/m."""
    return EPS0 * refractive_index(model, omega) ** 2


def inverse_permittivity(model: DispersionModel, omega: float) -> float:
    """eta(omega) = 1/eps(omega), in m/F; eps*eta == 1 by construction."""
    return 1.0 / permittivity(model, omega)


def d_eta_domega(model: DispersionModel, omega: float) -> float:
    """d(eta)/d(omega): analytic for closed-form models, central FD otherwise."""
    model.require_in_window(omega)
    return model.d_eta_domega(omega)


def velocity_ratio_R(model: DispersionModel, omega: float) -> float:
    """Velocity ratio R = v_p/v_g via four algebraic forms, cross-checked.

    Forms evaluated:
      (i)   (1/2eta) * (2eta - omega * d_eta/d_omega)
      (ii)  1 - (omega/2) * n^2 * d(1/n^2)/d_omega
      (iii) 1 + (omega/n) * dn/d_omega
      (iv)  (1/n) * d(omega*n)/d_omega

    Pairwise relative agreement is asserted (1e-10 analytic models, 1e-5
    tabulated); FormMismatch signals a broken derivative. Returns form (iv).
    """
    model.require_in_window(omega)
    n = model.n(omega)
    dn = model.dn_domega(omega)
    eta = 1.0 / (EPS0 * n * n)

    f1 = (2.0 * eta - omega * model.d_eta_domega(omega)) / (2.0 * eta)
    f2 = 1.0 - 0.5 * omega * n * n * model.d_inv_n2_domega(omega)
    f3 = 1.0 + (omega / n) * dn
    f4 = (n + omega * dn) / n

    forms = (f1, f2, f3, f4)
    tol = _R_TOL_ANALYTIC if model.analytic else _R_TOL_TABULATED
    scale = max(abs(f) for f in forms)
    for i in range(4):
        for j in range(i + 1, 4):
            if abs(forms[i] - forms[j]) > tol * scale:
                raise FormMismatch(
                    f"velocity-ratio forms disagree at omega = {omega:.6e}: "
                    f"{forms} (tol {tol:g})"
                )
    return f4


def phase_velocity(model: DispersionModel, omega: float) -> float:
    """v_p = c / n(omega)."""
    return C / refractive_index(model, omega)


def group_velocity(model: DispersionModel, omega: float) -> float:
    """v_g = v_p / R, so v_p/v_g == R holds by construction."""
    return phase_velocity(model, omega) / velocity_ratio_R(model, omega)


def propagation_constant(model: DispersionModel, omega: float) -> float:
    """Bulk propagation constant k = omega * n(omega) / c, in rad/m."""
    return omega * refractive_index(model, omega) / C


# ---------------------------------------------------------------------------
# Construction from CLI / JSON config


def model_from_dict(spec: dict) -> DispersionModel:
    """Build a model from its JSON description.

    Accepted forms::

        {"type": "constant", "n": 1.5, "window_rad_s": [lo, hi]}   # window optional
        {"type": "sellmeier", "terms": [{"B": ..., "lambda2_m2": ...}, ...],
         "window_rad_s": [lo, hi]}
        {"type": "tabulated", "samples": [[omega, n], ...]}
        {"type": "linear", "n_ref": ..., "slope": ..., "omega_ref_rad_s": ...,
         "window_rad_s": [lo, hi]}
    """
    kind = spec.get("type")
    if kind == "constant":
        window = tuple(spec.get("window_rad_s", (0.0, math.inf)))
        return ConstantIndex(float(spec["n"]), window)
    if kind == "sellmeier":
        terms = tuple((float(t["B"]), float(t["lambda2_m2"])) for t in spec["terms"])
        return Sellmeier(terms, tuple(spec["window_rad_s"]))
    if kind == "tabulated":
        return Tabulated(tuple((float(w), float(n)) for w, n in spec["samples"]))
    if kind == "linear":
        return LinearIndex(
            float(spec["n_ref"]),
            float(spec["slope"]),
            float(spec["omega_ref_rad_s"]),
            tuple(spec["window_rad_s"]),
        )
    raise ValueError(f"unknown dispersion model type: {kind!r}")
