"""Independent reference implementations used by the tests and as a fallback.

Nothing here shares code with the fast paths: the exponential is a plain
scaled-and-squared power series and the eigensolver is cyclic Jacobi, so both
serve as oracles for the spectral-interpolation route.
"""

from __future__ import annotations

import numpy as np

from .charpoly import build_coupling_matrix
from .eigensolver import Spectrum
from .exceptions import ConvergenceError
from .validation import check_couplings, check_square_matrix

__all__ = ["series_expm", "jacobi_eigenvalues", "reference_spectrum"]

_MAX_JACOBI_SWEEPS = 60


def series_expm(matrix, t: float) -> np.ndarray:
    """exp(-i*t*M) by scaling and squaring of the truncated power series.

    The factor -i*t is folded into the matrix before scaling. The scaled norm
    is at most 1/2, and the series runs for at least 20 terms and until the
    term norm drops below 1e-18, which puts the truncation error at the
    roundoff floor.
    """
    m = check_square_matrix(matrix)
    a = (-1j * float(t)) * m
    dim = a.shape[0]
    norm = float(np.linalg.norm(a))
    squarings = 0
    if norm > 0.5:
        squarings = int(np.ceil(np.log2(norm / 0.5)))
        a = a / (2.0**squarings)
    total = np.eye(dim, dtype=complex)
    term = np.eye(dim, dtype=complex)
    for k in range(1, 61):
        term = term @ a / k
        total += term
        if k >= 20 and float(np.linalg.norm(term)) < 1e-18:
            break
    for _ in range(squarings):
        total = total @ total
    return total


def jacobi_eigenvalues(matrix, rel_tol: float = 1e-14) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.

    Sweeps rotate away every off-diagonal entry in turn until the
    off-diagonal Frobenius norm falls below ``rel_tol`` times the matrix
    norm. Returns the eigenvalues sorted descending.
    """
    a = np.array(check_square_matrix(matrix, dtype=float), copy=True)
    dim = a.shape[0]
    scale = float(np.linalg.norm(a))
    if scale == 0.0:
        return np.zeros(dim)
    if float(np.max(np.abs(a - a.T))) > 1e-12 * scale:
        raise ValueError("matrix: Jacobi eigensolver requires a symmetric matrix")

    def off_norm() -> float:
        off = a - np.diag(np.diag(a))
        return float(np.linalg.norm(off))

    for _ in range(_MAX_JACOBI_SWEEPS):
        if off_norm() <= rel_tol * scale:
            return np.sort(np.diag(a))[::-1].copy()
        for p in range(dim - 1):
            for q in range(p + 1, dim):
                apq = a[p, q]
                if abs(apq) <= 1e-300 * scale:
                    a[p, q] = a[q, p] = 0.0
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(tau) > 1e10:
                    # asymptotic small root of t^2 + 2*tau*t - 1 = 0
                    tangent = 0.5 / tau
                elif tau >= 0.0:
                    tangent = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    tangent = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                cos = 1.0 / np.sqrt(1.0 + tangent * tangent)
                sin = tangent * cos
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = cos * row_p - sin * row_q
                a[q, :] = sin * row_p + cos * row_q
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = cos * col_p - sin * col_q
                a[:, q] = sin * col_p + cos * col_q
                a[p, q] = a[q, p] = 0.0
    if off_norm() <= rel_tol * scale:
        return np.sort(np.diag(a))[::-1].copy()
    raise ConvergenceError("Jacobi sweeps exceeded the iteration cap")


def reference_spectrum(couplings) -> Spectrum:
    """Spectrum of the coupling matrix via the Jacobi reference solver."""
    g = check_couplings(couplings)
    return Spectrum.from_values(jacobi_eigenvalues(build_coupling_matrix(g)))
