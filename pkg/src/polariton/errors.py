"""Exception hierarchy shared by all polariton modules."""


class PolaritonError(Exception):
    """Base class for all errors raised by this package."""


class OutOfWindow(PolaritonError):
    """Frequency lies outside a model's declared validity window."""

    def __init__(self, omega, window):
        self.omega = omega
        self.window = window
        super().__init__(
            f"omega = {omega:.6e} rad/s outside validity window "
            f"[{window[0]:.6e}, {window[1]:.6e}] rad/s"
        )


class NonPhysical(PolaritonError):
    """A model evaluated to n^2 <= 0 (not a transparent medium)."""


class FormMismatch(PolaritonError):
    """The algebraic forms of the velocity ratio disagree beyond tolerance.

    Signals a broken derivative implementation, not a user error.
    """


class NegativeSpectrum(PolaritonError):
    """A spectral density sample is negative."""


class BelowCutoff(PolaritonError):
    """Requested slab mode is not guided at this frequency."""

    def __init__(self, m, omega):
        self.m = m
        self.omega = omega
        super().__init__(f"mode m={m} is below cutoff at omega = {omega:.6e} rad/s")


class NoCutoffInWindow(PolaritonError):
    """No cutoff frequency exists inside the model validity window."""


class OutsideSlab(PolaritonError):
    """Field evaluation point lies outside the slab."""


class SolverFailure(PolaritonError):
    """Eigen-solver did not converge."""


class NoGuidedModes(PolaritonError):
    """The transverse eigenproblem produced no guided (beta^2 > 0) mode."""


class NoConvergence(PolaritonError):
    """Self-consistent iteration hit the iteration limit."""


class WindowExit(PolaritonError):
    """Self-consistent iteration stepped outside the validity window."""


class ZeroNorm(PolaritonError):
    """Mode field has (numerically) zero norm; cannot normalize."""


class GridMismatch(PolaritonError):
    """Two fields are not sampled on the same grid."""


class BandMismatch(PolaritonError):
    """Modes belong to different frequency bands."""


class GridTooCoarse(PolaritonError):
    """Grid spacing too coarse for a discrete curl (need h <= lambda/50)."""


class GridNotUniform(PolaritonError):
    """A uniform grid was required."""


class ConfigError(PolaritonError):
    """CLI configuration failed validation (exit code 2)."""


class NumericalFailure(PolaritonError):
    """A numerical identity check failed during a CLI run (exit code 3)."""
