"""Input validation helpers shared by the library, the estimator and the CLI."""

from __future__ import annotations

import numpy as np

__all__ = [
    "check_couplings",
    "check_square_matrix",
    "as_state_vector",
    "check_times",
]


def check_couplings(couplings, n: int | None = None) -> np.ndarray:
    """Validate coupling constants and return them as a float array.

    Couplings must be finite and strictly positive: a zero coupling splits the
    level chain into independent blocks and degenerates the spectrum, which
    the downstream formulas cannot represent. If ``n`` is given the length
    must be ``n - 1``.
    """
    g = np.atleast_1d(np.asarray(couplings, dtype=float))
    if g.ndim != 1 or g.size < 1:
        raise ValueError("couplings: expected a non-empty 1-d sequence")
    if not np.all(np.isfinite(g)):
        raise ValueError("couplings: all entries must be finite")
    if np.any(g <= 0.0):
        raise ValueError("couplings: all entries must be strictly positive")
    if n is not None and g.size != n - 1:
        raise ValueError(f"couplings: expected {n - 1} values for n={n}, got {g.size}")
    return g


def check_square_matrix(matrix, dtype=complex) -> np.ndarray:
    """Return ``matrix`` as a square 2-d array with finite entries."""
    m = np.asarray(matrix, dtype=dtype)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix: expected a square 2-d array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix: entries must be finite")
    return m


def as_state_vector(initial, n: int, norm_tol: float = 1e-6) -> np.ndarray:
    """Turn a level index or an amplitude sequence into a normalized state.

    An integer selects a single level (exact basis vector). A sequence of n
    amplitudes is accepted if its norm is within ``norm_tol`` of 1 and is then
    renormalized exactly; anything further from normalized is rejected.
    """
    if np.isscalar(initial) and not isinstance(initial, (complex, np.complexfloating)):
        idx = int(initial)
        if idx != initial:
            raise ValueError("initial: level index must be an integer")
        if not 0 <= idx < n:
            raise ValueError(f"initial: level index {idx} out of range for n={n}")
        psi = np.zeros(n, dtype=complex)
        psi[idx] = 1.0
        return psi
    psi = np.asarray(initial, dtype=complex)
    if psi.shape != (n,):
        raise ValueError(f"initial: expected {n} amplitudes, got shape {psi.shape}")
    if not np.all(np.isfinite(psi.view(float))):
        raise ValueError("initial: amplitudes must be finite")
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > norm_tol:
        raise ValueError(f"initial: state is not normalized (norm={norm:.6g})")
    return psi / norm


def check_times(times) -> np.ndarray:
    """Return ``times`` as a finite 1-d float array."""
    t = np.atleast_1d(np.asarray(times, dtype=float))
    if t.ndim != 1:
        raise ValueError(f"times: expected a 1-d sequence, got shape {t.shape}")
    if not np.all(np.isfinite(t)):
        raise ValueError("times: entries must be finite")
    return t
