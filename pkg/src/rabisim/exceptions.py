"""Exception types shared across the package.

``ValueError`` is reserved for bad user input; everything numerical that can
go wrong at runtime derives from :class:`NumericalError` so callers (and the
CLI exit-code mapping) can tell the two apart.
"""


class NumericalError(RuntimeError):
    """A numerical procedure failed on otherwise well-formed input."""


class DegenerateSpectrumError(NumericalError):
    """Eigenvalue gap too small for the spectral-interpolation denominators."""


class NonRealRootsError(NumericalError):
    """Cubic discriminant indicates complex roots; the input is invalid or corrupt."""


class ConvergenceError(NumericalError):
    """An iterative solver exceeded its iteration cap."""
