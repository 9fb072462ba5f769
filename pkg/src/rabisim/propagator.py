"""Evolution operator and level populations.

The exponential exp(-i*t*C) is expanded as a degree n-1 matrix polynomial
whose scalar coefficients interpolate exp(-i*t*lam) on the spectrum
(Lagrange interpolation written in the monomial basis). Time enters only
through those scalars, so a sweep over many times reuses the matrix powers.

The full evolution operator adds the global energy phase and the adjoint of
the diagonal drive-phase matrix:

    U(t) = exp(-i*t*e0) * V(t)^dagger * exp(-i*t*C)
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .charpoly import build_coupling_matrix
from .eigensolver import (
    DEFAULT_TOL,
    Spectrum,
    eigenvalues_closed,
    eigenvalues_general,
)
from .exceptions import DegenerateSpectrumError
from .validation import as_state_vector, check_couplings, check_square_matrix, check_times

__all__ = [
    "DriveConfig",
    "SylvesterCoeffs",
    "SweepResult",
    "sylvester_coeffs",
    "matrix_powers",
    "expm_sylvester",
    "phase_matrix",
    "evolution_operator",
    "populations",
    "population_sweep",
]

METHODS = ("closed", "general", "oracle")
DEGENERACY_THRESHOLD = 1e-8  # relative to the spectral radius


@dataclass(frozen=True, eq=False)
class DriveConfig:
    """Field frequencies, phases and the ground energy of the drive.

    ``omegas[k]`` and ``phis[k]`` belong to the field coupling levels k and
    k+1; ``e0`` is the ground-level energy entering only as a global phase.
    """

    omegas: np.ndarray
    phis: np.ndarray
    e0: float = 0.0

    def __post_init__(self):
        om = np.atleast_1d(np.asarray(self.omegas, dtype=float))
        ph = np.atleast_1d(np.asarray(self.phis, dtype=float))
        if om.ndim != 1 or ph.ndim != 1 or om.size != ph.size or om.size < 1:
            raise ValueError("drive: omegas and phis must be 1-d and the same length")
        if not (np.all(np.isfinite(om)) and np.all(np.isfinite(ph)) and np.isfinite(self.e0)):
            raise ValueError("drive: entries must be finite")
        object.__setattr__(self, "omegas", om)
        object.__setattr__(self, "phis", ph)
        object.__setattr__(self, "e0", float(self.e0))
        om.flags.writeable = False
        ph.flags.writeable = False

    @property
    def n_levels(self) -> int:
        return self.omegas.size + 1

    @classmethod
    def zero(cls, n: int) -> "DriveConfig":
        """Quiet drive: all frequencies and phases zero, ground energy zero."""
        if n < 2:
            raise ValueError("drive: need at least two levels")
        return cls(omegas=np.zeros(n - 1), phis=np.zeros(n - 1), e0=0.0)

    @classmethod
    def from_energies(cls, energies, phis=None) -> "DriveConfig":
        """Derive resonant frequencies from the level energies E_0..E_{n-1}.

        omega_k = E_k - E_{k-1} and e0 = E_0. Strictly decreasing level gaps
        keep every field resonant with exactly one transition; a drive that
        violates that ordering is accepted but triggers a warning.
        """
        e = np.atleast_1d(np.asarray(energies, dtype=float))
        if e.ndim != 1 or e.size < 2:
            raise ValueError("energies: expected at least two level energies")
        if not np.all(np.isfinite(e)):
            raise ValueError("energies: entries must be finite")
        omegas = np.diff(e)
        if phis is None:
            phis = np.zeros(omegas.size)
        if omegas.size > 1 and not np.all(np.diff(omegas) < 0.0):
            warnings.warn(
                "level gaps E_k - E_{k-1} are not strictly decreasing; "
                "fields may address more than one transition",
                stacklevel=2,
            )
        return cls(omegas=omegas, phis=np.asarray(phis, dtype=float), e0=float(e[0]))


@dataclass(frozen=True, eq=False)
class SylvesterCoeffs:
    """Scalar coefficients f_0(t)..f_{n-1}(t) of the exponential polynomial.

    ``esym_tables[k, i]`` holds the degree-i elementary symmetric polynomial
    of the eigenvalues with the k-th one omitted (degree 0 is 1).
    """

    t: float
    f: np.ndarray
    esym_tables: np.ndarray


def sylvester_coeffs(spectrum: Spectrum, t: float) -> SylvesterCoeffs:
    """Interpolation coefficients of exp(-i*t*C) on a simple spectrum.

    For each eigenvalue the weight is exp(-i*t*lam_k) over the product of its
    gaps to the others; coefficient l combines these with the degree
    n-1-l elementary symmetric polynomials of the remaining eigenvalues and
    an alternating sign:

        f_l(t) = (-1)^l * sum_k  esym_{n-1-l}(lam, omit k) * w_k(t)

    Raises :class:`DegenerateSpectrumError` when the smallest gap is below
    the breakdown threshold (the weights then divide by almost zero).
    """
    lam = spectrum.eigenvalues
    n = lam.size
    if spectrum.gap_min < DEGENERACY_THRESHOLD * max(spectrum.scale, 1e-300):
        raise DegenerateSpectrumError(
            f"eigenvalue gap {spectrum.gap_min:.3e} too small for spectral "
            "interpolation; use the series exponential instead"
        )
    esym = np.zeros((n, n))
    weights = np.empty(n, dtype=complex)
    for k in range(n):
        others = np.delete(lam, k)
        e = np.zeros(n)
        e[0] = 1.0
        for filled, x in enumerate(others, start=1):
            for i in range(filled, 0, -1):
                e[i] += x * e[i - 1]
        esym[k] = e
        weights[k] = np.exp(-1j * t * lam[k]) / np.prod(others - lam[k])
    signs = (-1.0) ** np.arange(n)
    f = np.array([signs[l] * np.dot(esym[:, n - 1 - l], weights) for l in range(n)])
    return SylvesterCoeffs(t=float(t), f=f, esym_tables=esym)


def matrix_powers(matrix, count: int) -> list[np.ndarray]:
    """[I, M, M^2, ..., M^(count-1)] by iterated multiplication."""
    m = check_square_matrix(matrix)
    powers = [np.eye(m.shape[0], dtype=m.dtype)]
    for _ in range(count - 1):
        powers.append(powers[-1] @ m)
    return powers


def _combine(powers: list[np.ndarray], f: np.ndarray) -> np.ndarray:
    out = np.zeros(powers[0].shape, dtype=complex)
    for coeff, power in zip(f, powers):
        out += coeff * power
    return out


def expm_sylvester(coupling_matrix, coeffs: SylvesterCoeffs) -> np.ndarray:
    """exp(-i*t*C) as the coefficient-weighted sum of powers of C.

    ``coeffs`` must have been built from the spectrum of this matrix; only
    the dimensions are checked here.
    """
    c = check_square_matrix(coupling_matrix)
    n = c.shape[0]
    if coeffs.f.size != n:
        raise ValueError(
            f"dimension mismatch: matrix is {n}x{n} but got {coeffs.f.size} coefficients"
        )
    return _combine(matrix_powers(c, n), coeffs.f)


def phase_matrix(drive: DriveConfig, t: float) -> np.ndarray:
    """Diagonal phase accumulation of the drive.

    Entry (j, j) carries the cumulative frequency and cumulative phase of the
    first j fields; entry (0, 0) is 1.
    """
    omega_cum = np.concatenate(([0.0], np.cumsum(drive.omegas)))
    phi_cum = np.concatenate(([0.0], np.cumsum(drive.phis)))
    return np.diag(np.exp(1j * (omega_cum * t + phi_cum)))


def _resolve_spectrum(g: np.ndarray, method: str, tol: float) -> Spectrum:
    if method == "closed":
        if g.size + 1 > 7:
            raise ValueError("method 'closed' supports at most 7 levels")
        return eigenvalues_closed(g)
    return eigenvalues_general(g, tol=tol)


def evolution_operator(
    couplings,
    drive: DriveConfig | None = None,
    t: float = 0.0,
    method: str = "general",
    tol: float = DEFAULT_TOL,
) -> np.ndarray:
    """Full evolution operator U(t) for one instant.

    ``method`` picks how exp(-i*t*C) is produced: "closed" (algebraic
    eigenvalues, n <= 7), "general" (bisection/Newton eigenvalues), or
    "oracle" (series exponential, no eigenvalues involved). A drive of None
    means no fields and zero ground energy.
    """
    g = check_couplings(couplings)
    n = g.size + 1
    if method not in METHODS:
        raise ValueError(f"method: expected one of {METHODS}, got {method!r}")
    if drive is None:
        drive = DriveConfig.zero(n)
    if drive.n_levels != n:
        raise ValueError(f"drive: configured for {drive.n_levels} levels, couplings give {n}")
    c = build_coupling_matrix(g)
    if method == "oracle":
        from .reference import series_expm

        core = series_expm(c, t)
    else:
        spectrum = _resolve_spectrum(g, method, tol)
        if spectrum.gap_min < DEGENERACY_THRESHOLD * spectrum.scale:
            from .reference import series_expm

            core = series_expm(c, t)
        else:
            core = expm_sylvester(c, sylvester_coeffs(spectrum, t))
    return _apply_drive(core, drive, t)


def _apply_drive(core: np.ndarray, drive: DriveConfig, t: float) -> np.ndarray:
    phase_diag = np.diag(phase_matrix(drive, t))
    return np.exp(-1j * t * drive.e0) * (np.conj(phase_diag)[:, None] * core)


def populations(evolution, initial=0) -> np.ndarray:
    """Level occupation probabilities after applying ``evolution`` to ``initial``.

    ``initial`` is a level index or a normalized amplitude vector. The
    operator must be unitary to reasonable accuracy, otherwise the
    probabilities would not sum to one.
    """
    u = check_square_matrix(evolution)
    n = u.shape[0]
    defect = float(np.linalg.norm(u.conj().T @ u - np.eye(n)))
    if defect > 1e-6:
        raise ValueError(f"evolution operator is not unitary (defect {defect:.3e})")
    psi = as_state_vector(initial, n)
    amps = u @ psi
    return np.abs(amps) ** 2


@dataclass(eq=False)
class SweepResult:
    """Populations over a time grid plus the diagnostics of how they were made."""

    times: np.ndarray
    populations: np.ndarray
    spectrum: Spectrum
    method_used: str
    max_unitarity_defect: float
    degenerate_fallback: bool = field(default=False)


def population_sweep(
    couplings,
    drive: DriveConfig | None = None,
    times=(0.0,),
    method: str = "general",
    initial=0,
    tol: float = DEFAULT_TOL,
    spectrum: Spectrum | None = None,
) -> SweepResult:
    """Populations for every time in ``times``, sharing work across the grid.

    The matrix powers are built once; only the scalar coefficients change
    from sample to sample. A precomputed ``spectrum`` can be supplied to skip
    the eigenvalue solve (the estimator does this).
    """
    from .reference import reference_spectrum, series_expm

    g = check_couplings(couplings)
    n = g.size + 1
    if method not in METHODS:
        raise ValueError(f"method: expected one of {METHODS}, got {method!r}")
    if drive is None:
        drive = DriveConfig.zero(n)
    if drive.n_levels != n:
        raise ValueError(f"drive: configured for {drive.n_levels} levels, couplings give {n}")
    t_grid = check_times(times)
    psi = as_state_vector(initial, n)
    c = build_coupling_matrix(g)

    fallback = False
    if method == "oracle":
        if spectrum is None:
            spectrum = reference_spectrum(g)  # reported in diagnostics only
        use_series = True
    else:
        if spectrum is None:
            spectrum = _resolve_spectrum(g, method, tol)
        use_series = spectrum.gap_min < DEGENERACY_THRESHOLD * spectrum.scale
        fallback = use_series

    powers = None if use_series else matrix_powers(c, n)
    omega_cum = np.concatenate(([0.0], np.cumsum(drive.omegas)))
    phi_cum = np.concatenate(([0.0], np.cumsum(drive.phis)))
    pops = np.empty((t_grid.size, n))
    max_defect = 0.0
    eye = np.eye(n)
    for row, t in enumerate(t_grid):
        if use_series:
            core = series_expm(c, t)
        else:
            core = _combine(powers, sylvester_coeffs(spectrum, t).f)
        phase_diag = np.exp(1j * (omega_cum * t + phi_cum))
        u = np.exp(-1j * t * drive.e0) * (np.conj(phase_diag)[:, None] * core)
        max_defect = max(max_defect, float(np.linalg.norm(u.conj().T @ u - eye)))
        pops[row] = np.abs(u @ psi) ** 2
    return SweepResult(
        times=t_grid,
        populations=pops,
        spectrum=spectrum,
        method_used="oracle" if use_series else method,
        max_unitarity_defect=max_defect,
        degenerate_fallback=fallback,
    )
