"""Exact propagators and level populations for a resonantly driven n-level atom.

The coupling matrix of the system is real symmetric tridiagonal with zero
diagonal. Everything downstream (characteristic polynomial, spectrum,
exponential, populations) is exact up to floating point; no time stepping
or perturbation theory is involved.
"""

from .charpoly import (
    CharPoly,
    build_coupling_matrix,
    char_poly_closed_form,
    char_poly_recurrence,
    eval_char_poly,
    gershgorin_radius,
)
from .eigensolver import (
    CubicRoots,
    Spectrum,
    cardano_cubic,
    eigenvalues_closed,
    eigenvalues_general,
    sturm_count_below,
)
from .exceptions import (
    ConvergenceError,
    DegenerateSpectrumError,
    NonRealRootsError,
    NumericalError,
)
from .model import RabiOscillation
from .propagator import (
    DriveConfig,
    SweepResult,
    SylvesterCoeffs,
    evolution_operator,
    expm_sylvester,
    phase_matrix,
    population_sweep,
    populations,
    sylvester_coeffs,
)
from .reference import jacobi_eigenvalues, reference_spectrum, series_expm

__version__ = "0.1.0"

__all__ = [
    "CharPoly",
    "ConvergenceError",
    "CubicRoots",
    "DegenerateSpectrumError",
    "DriveConfig",
    "NonRealRootsError",
    "NumericalError",
    "RabiOscillation",
    "Spectrum",
    "SweepResult",
    "SylvesterCoeffs",
    "build_coupling_matrix",
    "cardano_cubic",
    "char_poly_closed_form",
    "char_poly_recurrence",
    "eigenvalues_closed",
    "eigenvalues_general",
    "eval_char_poly",
    "evolution_operator",
    "expm_sylvester",
    "gershgorin_radius",
    "jacobi_eigenvalues",
    "phase_matrix",
    "population_sweep",
    "populations",
    "reference_spectrum",
    "series_expm",
    "sturm_count_below",
    "sylvester_coeffs",
    "__version__",
]
