"""Spatial mode solving: analytic infinite-barrier slab and FD eigenproblem.

Two solvers live here. The slab functions evaluate the closed-form modes
of an infinite-barrier slab of thickness D (transverse wavenumber
k_x = m*pi/D, propagation constant beta_m = sqrt(omega^2 n^2/c^2 - k_x^2)),
including cutoffs, zigzag-angle velocities and dispersion curves
beta_m(omega). The finite-difference solver discretizes the transverse
Helmholtz eigenproblem

    laplacian w + omega^2 c^-2 n^2(x, omega) w = beta^2 w   (omega fixed)

with second-order central differences and Dirichlet boundaries on a
uniform 1D or 2D grid. When the index profile is frequency dependent the
eigenvalue enters its own operator; self_consistent_omega resolves the
fixed point omega -> beta_m(omega) by secant iteration.

Scalar approximation throughout: one field component per mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg
from scipy.optimize import brentq

from .constants import C
from .dispersion import (
    ConstantIndex,
    DispersionModel,
    group_velocity,
    phase_velocity,
    propagation_constant,
    refractive_index,
)
from .errors import (
    BelowCutoff,
    NoConvergence,
    NoCutoffInWindow,
    NoGuidedModes,
    OutOfWindow,
    OutsideSlab,
    SolverFailure,
    WindowExit,
)

__all__ = [
    "SlabGuide",
    "SlabMode",
    "DispersionCurve",
    "IndexProfile",
    "DiscreteMode",
    "slab_beta",
    "slab_cutoff",
    "slab_mode_field",
    "slab_velocities",
    "dispersion_curve",
    "fd_transverse_modes",
    "self_consistent_omega",
    "material_dispersion_velocities",
]

_DENSE_LIMIT = 2000          # unknowns; above this the sparse path is used
_MIN_INTERIOR_POINTS = 64


# ---------------------------------------------------------------------------
# Analytic slab


@dataclass(frozen=True)
class SlabGuide:
    """Infinite-barrier slab of thickness D filled with one medium."""

    D: float
    model: DispersionModel

    def __post_init__(self):
        if self.D <= 0:
            raise ValueError("slab thickness must be positive")


@dataclass(frozen=True)
class SlabMode:
    """Closed-form slab mode: k_x = m*pi/D, parity fixed by the boundary."""

    m: int
    k_x: float
    parity: str          # "even" (cos) or "odd" (sin) about x = 0
    theta: float         # zigzag angle, rad
    kappa: float         # bulk wavenumber k(omega), rad/m


@dataclass(frozen=True)
class DispersionCurve:
    """Sampled guided branch (omega, beta) of one transverse index m."""

    m: int
    omega: np.ndarray
    beta: np.ndarray


def slab_beta(guide: SlabGuide, m: int, omega: float) -> float:
    """beta_m = sqrt(omega^2 n^2/c^2 - (m*pi/D)^2); BelowCutoff if radicand <= 0.

    m = 0 is the bulk reference line beta = omega*n/c.
    """
    if m < 0:
        raise ValueError("mode index must be >= 0")
    k = propagation_constant(guide.model, omega)
    radicand = k * k - (m * math.pi / guide.D) ** 2
    if radicand <= 0:
        raise BelowCutoff(m, omega)
    return math.sqrt(radicand)


def slab_cutoff(guide: SlabGuide, m: int) -> float:
    """Smallest omega with beta_m = 0.

    Closed form m*pi*c/(n*D) for a constant index; bisection on the
    radicand otherwise. m = 0 has no cutoff (the bulk line starts at 0).
    """
    if m < 1:
        raise NoCutoffInWindow("m = 0 has no cutoff; the bulk line starts at zero")
    if isinstance(guide.model, ConstantIndex):
        return m * math.pi * C / (guide.model.n0 * guide.D)

    lo, hi = guide.model.window
    lo = max(lo, 1e-6 * hi if math.isfinite(hi) else 1.0)
    if not math.isfinite(hi):
        raise NoCutoffInWindow("cutoff search needs a finite validity window")

    def radicand(w):
        k = propagation_constant(guide.model, w)
        return k * k - (m * math.pi / guide.D) ** 2

    if radicand(lo) > 0 or radicand(hi) < 0:
        raise NoCutoffInWindow(
            f"beta_{m} does not change sign inside [{lo:.6e}, {hi:.6e}] rad/s"
        )
    return brentq(radicand, lo, hi, xtol=1e-9 * hi, rtol=1e-14)


def slab_mode_field(guide: SlabGuide, m: int, x: float, amplitude: float = 1.0) -> float:
    """Unnormalized transverse field of slab mode m at position x.

    Odd m -> cos(k_x x), even m -> sin(k_x x): with k_x = m*pi/D these are
    the branches that vanish at x = +-D/2. Fundamental is m = 1 (cosine,
    no interior node); m = 0 is reserved for the bulk reference line.
    """
    if m < 1:
        raise ValueError("field is defined for guided modes m >= 1")
    if abs(x) > guide.D / 2:
        raise OutsideSlab(f"|x| = {abs(x):.6e} m exceeds D/2 = {guide.D / 2:.6e} m")
    k_x = m * math.pi / guide.D
    if m % 2 == 1:
        return amplitude * math.cos(k_x * x)
    return amplitude * math.sin(k_x * x)


def slab_velocities(guide: SlabGuide, m: int, omega: float):
    """(v_g, v_p, theta) of slab mode m with the band-frozen index n(omega).

    v_g = (c/n) cos(theta), v_p = c/(n cos(theta)), so v_g*v_p = c^2/n^2
    exactly. theta is the zigzag angle, cos(theta) = beta/k.
    """
    n = refractive_index(guide.model, omega)
    k = omega * n / C
    if m == 0:
        cos_theta = 1.0
    else:
        radicand = k * k - (m * math.pi / guide.D) ** 2
        if radicand <= 0:
            raise BelowCutoff(m, omega)
        cos_theta = math.sqrt(radicand) / k
    v_g = (C / n) * cos_theta
    v_p = C / (n * cos_theta)
    return v_g, v_p, math.acos(min(cos_theta, 1.0))


def dispersion_curve(guide: SlabGuide, m: int, omega_grid) -> DispersionCurve:
    """Sample beta_m(omega) on an ascending grid; below-cutoff points omitted."""
    omega_grid = np.asarray(omega_grid, dtype=float)
    if np.any(np.diff(omega_grid) <= 0):
        raise ValueError("omega grid must be ascending")
    oms, betas = [], []
    for w in omega_grid:
        try:
            betas.append(slab_beta(guide, m, w))
            oms.append(w)
        except BelowCutoff:
            continue
    return DispersionCurve(m=m, omega=np.array(oms), beta=np.array(betas))


def material_dispersion_velocities(model: DispersionModel, omega: float):
    """Wide-guide limit (v_g, v_p): the bulk material values."""
    return group_velocity(model, omega), phase_velocity(model, omega)


# ---------------------------------------------------------------------------
# Finite-difference transverse eigenproblem


class IndexProfile:
    """Uniform transverse grid (1D or 2D) of dispersion models, Dirichlet walls.

    Interior grid points only; the field is implicitly zero one spacing
    outside the first/last point. All point models must share a common
    validity window.
    """

    def __init__(self, axes, models):
        axes = tuple(np.asarray(a, dtype=float) for a in axes)
        if len(axes) not in (1, 2):
            raise ValueError("profile must be 1D or 2D")
        for a in axes:
            if a.size < _MIN_INTERIOR_POINTS:
                raise ValueError(
                    f"need >= {_MIN_INTERIOR_POINTS} interior points per dimension"
                )
            steps = np.diff(a)
            if not np.allclose(steps, steps[0], rtol=1e-12, atol=0.0):
                raise ValueError("grid spacing must be uniform")
        self.axes = axes
        self.spacing = tuple(float(a[1] - a[0]) for a in axes)
        self.shape = tuple(a.size for a in axes)

        models = np.asarray(models, dtype=object)
        if models.shape != self.shape:
            raise ValueError(f"models shape {models.shape} != grid shape {self.shape}")
        self.models = models

        lo = max(m.window[0] for m in models.flat)
        hi = min(m.window[1] for m in models.flat)
        if lo >= hi:
            raise ValueError("point models have no common validity window")
        self.window = (lo, hi)

    @property
    def ndim(self):
        return len(self.axes)

    @property
    def cell_measure(self):
        return math.prod(self.spacing)

    def require_in_window(self, omega):
        lo, hi = self.window
        if not (omega > 0 and lo <= omega <= hi):
            raise OutOfWindow(omega, self.window)

    def map_models(self, fn) -> np.ndarray:
        """Evaluate fn(model) pointwise, caching per distinct model object."""
        cache = {}
        out = np.empty(self.shape)
        for idx, m in np.ndenumerate(self.models):
            key = id(m)
            if key not in cache:
                cache[key] = fn(m)
            out[idx] = cache[key]
        return out

    def n_squared(self, omega) -> np.ndarray:
        self.require_in_window(omega)
        return self.map_models(lambda m: refractive_index(m, omega) ** 2)

    # -- constructors -------------------------------------------------------

    @classmethod
    def uniform_1d(cls, model, width, n_points):
        """Dirichlet box of the given width filled with one medium.

        Interior points x_i = -width/2 + i*h, h = width/(n_points + 1):
        matches the infinite-barrier slab of thickness D = width.
        """
        h = width / (n_points + 1)
        x = -width / 2 + h * np.arange(1, n_points + 1)
        return cls((x,), np.full(n_points, model, dtype=object))

    @classmethod
    def step_1d(cls, core_model, clad_model, core_width, domain_width, n_points):
        """Symmetric step-index guide in a Dirichlet box of domain_width."""
        h = domain_width / (n_points + 1)
        x = -domain_width / 2 + h * np.arange(1, n_points + 1)
        models = np.where(np.abs(x) <= core_width / 2, core_model, clad_model)
        return cls((x,), models.astype(object))

    @classmethod
    def uniform_2d(cls, model, width_x, width_y, nx, ny):
        hx = width_x / (nx + 1)
        hy = width_y / (ny + 1)
        x = -width_x / 2 + hx * np.arange(1, nx + 1)
        y = -width_y / 2 + hy * np.arange(1, ny + 1)
        return cls((x, y), np.full((nx, ny), model, dtype=object))


@dataclass(frozen=True)
class DiscreteMode:
    """One FD eigenpair at fixed omega.

    rank counts guided-first eigenvalues sorted by beta^2 descending,
    starting at 0 (the fundamental; it has 0 interior sign changes, rank r
    has r). beta is NaN when the mode is unguided (beta^2 <= 0). field is
    L2-normalized with the first nonzero sample positive. residual is the
    eigen-residual relative to the operator scale.
    """

    beta: float
    beta_sq: float
    omega: float
    rank: int
    field: np.ndarray
    residual: float
    guided: bool


def _laplacian_1d(n, h):
    main = np.full(n, -2.0 / h**2)
    off = np.full(n - 1, 1.0 / h**2)
    return scipy.sparse.diags([off, main, off], [-1, 0, 1], format="csr")


def _operator(profile: IndexProfile, omega: float) -> scipy.sparse.spmatrix:
    pot = (omega / C) ** 2 * profile.n_squared(omega)
    if profile.ndim == 1:
        lap = _laplacian_1d(profile.shape[0], profile.spacing[0])
    else:
        nx, ny = profile.shape
        lx = _laplacian_1d(nx, profile.spacing[0])
        ly = _laplacian_1d(ny, profile.spacing[1])
        lap = scipy.sparse.kron(lx, scipy.sparse.identity(ny)) + \
            scipy.sparse.kron(scipy.sparse.identity(nx), ly)
    return (lap + scipy.sparse.diags(pot.ravel())).tocsr()


def _fix_sign(vec):
    nz = np.flatnonzero(np.abs(vec) > 1e-12 * np.abs(vec).max())
    if nz.size and vec[nz[0]] < 0:
        return -vec
    return vec


def fd_transverse_modes(profile: IndexProfile, omega: float, count: int):
    """The `count` largest-beta^2 eigenpairs of the discretized operator.

    Dense symmetric solve up to 2000 unknowns, shift-invert Lanczos above.
    Fields are orthonormal in the plain L2 sense (sum w^2 * cell = 1);
    dispersion weighting is applied later by the quantization layer.
    Raises NoGuidedModes if every returned eigenvalue has beta^2 <= 0.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    a = _operator(profile, omega)
    n_unknowns = a.shape[0]
    if count > n_unknowns:
        raise ValueError("requested more modes than grid unknowns")

    if n_unknowns <= _DENSE_LIMIT:
        vals, vecs = scipy.linalg.eigh(
            a.toarray(), subset_by_index=[n_unknowns - count, n_unknowns - 1]
        )
    else:
        sigma = float(((omega / C) ** 2 * profile.n_squared(omega)).max()) * (1 + 1e-9)
        try:
            vals, vecs = scipy.sparse.linalg.eigsh(
                a, k=count, sigma=sigma, which="LM", tol=1e-12, maxiter=10000
            )
        except scipy.sparse.linalg.ArpackNoConvergence as exc:
            raise SolverFailure(f"eigsh did not converge: {exc}") from exc

    order = np.argsort(vals)[::-1]
    vals, vecs = vals[order], vecs[:, order]

    cell = profile.cell_measure
    op_scale = float(np.max(np.abs(a).sum(axis=1)))  # inf-norm of the operator
    modes = []
    for r in range(count):
        lam = float(vals[r])
        vec = vecs[:, r]
        res = float(np.linalg.norm(a @ vec - lam * vec)
                    / (np.linalg.norm(vec) * op_scale))
        vec = _fix_sign(vec / (np.linalg.norm(vec) * math.sqrt(cell)))
        guided = lam > 0
        modes.append(DiscreteMode(
            beta=math.sqrt(lam) if guided else math.nan,
            beta_sq=lam,
            omega=omega,
            rank=r,
            field=vec.reshape(profile.shape),
            residual=res,
            guided=guided,
        ))
    if not any(m.guided for m in modes):
        raise NoGuidedModes(f"no beta^2 > 0 eigenvalue at omega = {omega:.6e} rad/s")
    return modes


def _signed_beta_sq(profile, omega, rank):
    modes = fd_transverse_modes(profile, omega, rank + 1)
    return modes[rank].beta_sq, modes[rank]


def self_consistent_omega(profile: IndexProfile, beta: float, rank: int,
                          omega0: float, max_iter: int = 100):
    """Solve omega such that the rank-th FD eigenvalue satisfies beta_rank(omega) = beta.

    Secant iteration on g(s) = beta_rank^2(s) - beta^2 with s = omega^2
    (beta^2 is exactly linear in omega^2 for a dispersionless uniform
    profile, so that case converges immediately). Converged when the omega
    update falls below 1e-10 relative.
    """
    profile.require_in_window(omega0)
    target = beta * beta

    def g_of(omega):
        if not (profile.window[0] <= omega <= profile.window[1]):
            raise WindowExit(
                f"iteration left the validity window at omega = {omega:.6e} rad/s"
            )
        beta_sq, mode = _signed_beta_sq(profile, omega, rank)
        return beta_sq - target, mode

    w_prev = omega0
    g_prev, mode = g_of(w_prev)
    w_cur = omega0 * (1.0 + 1e-4)
    g_cur, mode = g_of(w_cur)

    for _ in range(max_iter):
        if abs(w_cur - w_prev) < 1e-10 * abs(w_cur) and abs(g_cur) <= 1e-8 * target:
            return w_cur, mode
        denom = g_cur - g_prev
        if denom == 0.0:
            raise NoConvergence("flat objective: secant step undefined")
        s_next = w_cur**2 - g_cur * (w_cur**2 - w_prev**2) / denom
        if s_next <= 0:
            raise WindowExit("secant step produced omega^2 <= 0")
        w_next = math.sqrt(s_next)
        w_prev, g_prev = w_cur, g_cur
        w_cur = w_next
        g_cur, mode = g_of(w_cur)
        if abs(w_cur - w_prev) < 1e-10 * abs(w_cur):
            if abs(g_cur) <= 1e-8 * target:
                return w_cur, mode
            raise NoConvergence(
                f"stalled with residual g = {g_cur:.3e} at omega = {w_cur:.6e}"
            )
    raise NoConvergence(f"no fixed point after {max_iter} iterations")
