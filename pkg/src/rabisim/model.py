"""Scikit-learn style estimator wrapping the exact propagator.

Fitting resolves the coupling configuration into a spectrum and a drive;
transforming maps an array of times to the matching level populations.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .charpoly import build_coupling_matrix, char_poly_closed_form, char_poly_recurrence
from .eigensolver import DEFAULT_TOL
from .propagator import DriveConfig, evolution_operator, population_sweep

__all__ = ["RabiOscillation"]


class RabiOscillation(BaseEstimator, TransformerMixin):
    """Exact level populations of a resonantly driven n-level ladder.

    The model is an n-level atom whose adjacent levels are coupled by n-1
    resonant fields with Rabi frequencies ``couplings``. ``transform`` maps
    times to occupation probabilities of all n levels.

    Parameters
    ----------
    couplings : sequence of float, default=(1.0,)
        Positive Rabi couplings g_1..g_{n-1}; their count fixes n.
    omegas : sequence of float or None, default=None
        Field frequencies. None means all zero (rotating-frame picture).
        Mutually exclusive with ``energies``.
    phis : sequence of float or None, default=None
        Field phases, None meaning all zero.
    e0 : float, default=0.0
        Ground-level energy; enters only as a global phase.
    energies : sequence of float or None, default=None
        Level energies E_0..E_{n-1}. When given, frequencies are the level
        gaps and e0 is E_0; cannot be combined with ``omegas`` or ``e0``.
    method : {"auto", "closed", "general", "oracle"}, default="auto"
        Eigenvalue route. "auto" picks the algebraic closed forms when
        n <= 7 and the bisection/Newton solver otherwise. "oracle" skips
        the spectral construction and uses the series exponential.
    initial : int or sequence of complex, default=0
        Starting level index or a normalized amplitude vector.
    tol : float or None, default=None
        Relative eigenvalue tolerance for the general solver; None picks
        the library default.

    Attributes
    ----------
    n_levels_ : int
    coupling_matrix_ : ndarray of shape (n, n)
    char_poly_ : CharPoly
        Characteristic polynomial from the three-term recurrence.
    char_poly_closed_ : CharPoly
        The same polynomial from the combinatorial closed form.
    spectrum_ : Spectrum or None
        Eigenvalues (descending); None when method resolves to "oracle".
    drive_ : DriveConfig
    method_ : str
        The resolved method actually used.

    Examples
    --------
    >>> est = RabiOscillation(couplings=(1.0,)).fit()
    >>> p = est.transform([0.0, np.pi / 2])
    >>> p.round(12)
    array([[1., 0.],
           [0., 1.]])
    """

    def __init__(
        self,
        couplings=(1.0,),
        omegas=None,
        phis=None,
        e0=0.0,
        energies=None,
        method="auto",
        initial=0,
        tol=None,
    ):
        self.couplings = couplings
        self.omegas = omegas
        self.phis = phis
        self.e0 = e0
        self.energies = energies
        self.method = method
        self.initial = initial
        self.tol = tol

    def fit(self, X=None, y=None):
        """Resolve the configuration; X and y are ignored."""
        from .validation import check_couplings

        g = check_couplings(self.couplings)
        n = g.size + 1

        if self.energies is not None:
            if self.omegas is not None:
                raise ValueError("pass either energies or omegas, not both")
            if self.e0 != 0.0:
                raise ValueError("e0 is derived from energies; do not pass both")
            if np.atleast_1d(np.asarray(self.energies, dtype=float)).size != n:
                raise ValueError(
                    f"energies: expected {n} values for {n} levels"
                )
            drive = DriveConfig.from_energies(self.energies, phis=self.phis)
        else:
            omegas = np.zeros(n - 1) if self.omegas is None else self.omegas
            phis = np.zeros(n - 1) if self.phis is None else self.phis
            drive = DriveConfig(omegas=omegas, phis=phis, e0=float(self.e0))
            if drive.n_levels != n:
                raise ValueError(
                    f"drive arrays describe {drive.n_levels} levels, couplings give {n}"
                )

        if self.method not in ("auto", "closed", "general", "oracle"):
            raise ValueError(f"method: unknown value {self.method!r}")
        method = self.method
        if method == "auto":
            method = "closed" if n <= 7 else "general"
        if method == "closed" and n > 7:
            raise ValueError("method 'closed' supports at most 7 levels")

        self.n_levels_ = n
        self.couplings_ = g
        self.coupling_matrix_ = build_coupling_matrix(g)
        self.char_poly_ = char_poly_recurrence(g)
        self.char_poly_closed_ = char_poly_closed_form(g)
        self.drive_ = drive
        self.method_ = method
        self.tol_ = DEFAULT_TOL if self.tol is None else float(self.tol)

        if method == "oracle":
            self.spectrum_ = None
        else:
            from .propagator import _resolve_spectrum

            self.spectrum_ = _resolve_spectrum(g, method, self.tol_)
        return self

    def transform(self, X) -> np.ndarray:
        """Populations at the times in X.

        Parameters
        ----------
        X : array-like of shape (T,) or (T, 1)

        Returns
        -------
        ndarray of shape (T, n_levels)
        """
        check_is_fitted(self)
        times = np.asarray(X, dtype=float)
        if times.ndim == 2 and times.shape[1] == 1:
            times = times[:, 0]
        if times.ndim != 1:
            raise ValueError(f"X: expected shape (T,) or (T, 1), got {times.shape}")
        result = population_sweep(
            self.couplings_,
            drive=self.drive_,
            times=times,
            method=self.method_,
            initial=self.initial,
            tol=self.tol_,
            spectrum=self.spectrum_,
        )
        return result.populations

    def predict(self, X) -> np.ndarray:
        """Alias of :meth:`transform`."""
        return self.transform(X)

    def propagator(self, t: float) -> np.ndarray:
        """The full evolution operator U(t) at a single time."""
        check_is_fitted(self)
        return evolution_operator(
            self.couplings_,
            drive=self.drive_,
            t=float(t),
            method=self.method_,
            tol=self.tol_,
        )
