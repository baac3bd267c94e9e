"""Physical constants (SI, CODATA values).

EPS0 is derived as 1/(MU0*C**2) rather than taken from the CODATA table
directly, so that C**2 * MU0 * EPS0 == 1 holds to machine precision; the
energy-density and field-coefficient identities rely on this product being
exactly one. The derived value agrees with the tabulated vacuum permittivity
to within its experimental uncertainty (~1e-10 relative).

Not user-configurable: all formulas in this package assume SI.
"""

import scipy.constants as _sc

C = _sc.c                     # speed of light in vacuum, m/s (exact)
MU0 = _sc.mu_0                # vacuum permeability, H/m
EPS0 = 1.0 / (MU0 * C * C)    # vacuum permittivity, F/m
HBAR = _sc.hbar               # reduced Planck constant, J*s (exact)

ETA0 = 1.0 / EPS0             # vacuum inverse permittivity, m/F
