"""Mode solving and field quantization in dispersive structured dielectrics.

Subpackages:

* :mod:`polariton.dispersion` -- scalar material models n(omega) and all
  frequency-local derived quantities (velocities, velocity ratio R).
* :mod:`polariton.energy` -- dispersive energy-density kernels, stationary
  ensemble averages and Poynting flux.
* :mod:`polariton.modes` -- analytic slab modes and the finite-difference
  transverse eigenproblem with self-consistent frequency iteration.
* :mod:`polariton.quantization` -- dispersion-weighted normalization,
  nonorthogonality diagnostics, band weights and quantized-field
  coefficient functions.
* :mod:`polariton.cli` -- batch front end emitting CSV artifacts and
  pass/fail reports.
"""

from . import constants, dispersion, energy, errors, modes, quantization

__all__ = ["constants", "dispersion", "energy", "errors", "modes", "quantization"]
__version__ = "0.1.0"
