"""Coupling matrix of the driven level chain and its characteristic polynomial.

Adjacent levels couple through one field each, so the effective generator is a
real symmetric tridiagonal matrix C with zero diagonal and the couplings g_k
on the off-diagonals. Its characteristic polynomial det(lam*I - C) is even in
lam (times an extra factor lam when n is odd), so it is fully described by the
positive coefficients phi_2, phi_4, ... of its even part.

Two independent constructions of those coefficients live here:

* :func:`char_poly_recurrence` runs the three-term determinant recurrence
  f_k = lam*f_{k-1} - g_{k-1}^2 * f_{k-2} in coefficient space.
* :func:`char_poly_closed_form` sums products g_{i1}^2 ... g_{ik}^2 over all
  strictly increasing index tuples whose consecutive entries differ by at
  least 2 (no two chosen couplings share a level).

They must agree to roundoff; the test suite checks this aggressively.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .validation import check_couplings

__all__ = [
    "CharPoly",
    "build_coupling_matrix",
    "char_poly_recurrence",
    "char_poly_closed_form",
    "eval_char_poly",
    "eval_char_poly_with_derivative",
    "iter_gap_tuples",
    "gershgorin_radius",
]


@dataclass(frozen=True, eq=False)
class CharPoly:
    """Even-part coefficients of det(lam*I - C).

    The full polynomial is reconstructed as

        lam^n - phi_2 lam^(n-2) + phi_4 lam^(n-4) - ...   (n even)
        lam * (same bracket of degree n-1)                (n odd)

    with ``even_coeffs = [phi_2, phi_4, ...]`` all strictly positive for
    valid couplings.
    """

    n: int
    even_coeffs: np.ndarray
    odd_parity: bool

    def __post_init__(self):
        coeffs = np.asarray(self.even_coeffs, dtype=float)
        object.__setattr__(self, "even_coeffs", coeffs)
        if self.n < 2:
            raise ValueError("CharPoly: degree must be at least 2")
        if coeffs.shape != (self.n // 2,):
            raise ValueError(
                f"CharPoly: expected {self.n // 2} even coefficients, got {coeffs.shape}"
            )
        if self.odd_parity != bool(self.n % 2):
            raise ValueError("CharPoly: parity flag inconsistent with degree")
        if not np.all(np.isfinite(coeffs)) or np.any(coeffs <= 0.0):
            raise ValueError("CharPoly: even coefficients must be finite and positive")
        coeffs.flags.writeable = False


def build_coupling_matrix(couplings) -> np.ndarray:
    """Assemble the symmetric tridiagonal coupling matrix.

    Diagonal entries are exactly zero; entry (k, k+1) = (k+1, k) = g_{k+1}.
    """
    g = check_couplings(couplings)
    n = g.size + 1
    c = np.zeros((n, n))
    idx = np.arange(n - 1)
    c[idx, idx + 1] = g
    c[idx + 1, idx] = g
    return c


def gershgorin_radius(couplings) -> float:
    """Inclusion radius for the spectrum: max_k (g_{k-1} + g_k), boundary g's zero."""
    g = check_couplings(couplings)
    padded = np.concatenate(([0.0], g, [0.0]))
    return float(np.max(padded[:-1] + padded[1:]))


def char_poly_recurrence(couplings) -> CharPoly:
    """Characteristic polynomial via the three-term determinant recurrence.

    The recurrence is run on packed coefficient lists (entry j holds the
    coefficient of lam^(k-2j)), so no polynomial evaluation is involved and
    the skipped odd/even slots are never stored.
    """
    g = check_couplings(couplings)
    n = g.size + 1
    gsq = g * g
    prev = [1.0]  # f_0
    cur = [1.0]  # f_1 = lam
    for k in range(2, n + 1):
        nxt = [0.0] * (k // 2 + 1)
        for j, c in enumerate(cur):
            nxt[j] += c
        for j, c in enumerate(prev):
            nxt[j + 1] -= gsq[k - 2] * c
        prev, cur = cur, nxt
    signs = (-1.0) ** np.arange(1, len(cur))
    return CharPoly(n=n, even_coeffs=signs * cur[1:], odd_parity=bool(n % 2))


def iter_gap_tuples(n_indices: int, k: int):
    """Yield increasing k-tuples from {1..n_indices} with consecutive gaps >= 2.

    Lexicographic order, iterative state machine (no recursion), each
    admissible tuple exactly once. There are binomial(n_indices-k+1, k) of
    them.
    """
    if k == 0:
        yield ()
        return
    if n_indices - 2 * (k - 1) < 1:
        return
    idx = [1 + 2 * j for j in range(k)]
    while True:
        yield tuple(idx)
        # rightmost position that can still advance while leaving room for the tail
        j = k - 1
        while j >= 0 and idx[j] >= n_indices - 2 * (k - 1 - j):
            j -= 1
        if j < 0:
            return
        idx[j] += 1
        for i in range(j + 1, k):
            idx[i] = idx[i - 1] + 2


def char_poly_closed_form(couplings) -> CharPoly:
    """Characteristic polynomial by direct enumeration of admissible index tuples.

    phi_{2k} is the sum over all k-subsets of couplings no two of which are
    adjacent in the chain, of the product of their squares. Built completely
    independently of the recurrence.
    """
    g = check_couplings(couplings)
    n = g.size + 1
    gsq = g * g
    m = n // 2
    coeffs = np.empty(m)
    for k in range(1, m + 1):
        total = 0.0
        for tup in iter_gap_tuples(g.size, k):
            prod = 1.0
            for i in tup:
                prod *= gsq[i - 1]
            total += prod
        coeffs[k - 1] = total
    return CharPoly(n=n, even_coeffs=coeffs, odd_parity=bool(n % 2))


def eval_char_poly(p: CharPoly, lam: float) -> float:
    """Value of the full signed polynomial at ``lam`` (Horner on the even part)."""
    u = lam * lam
    acc = 1.0
    sign = -1.0
    for phi in p.even_coeffs:
        acc = acc * u + sign * phi
        sign = -sign
    return acc * lam if p.odd_parity else acc


def eval_char_poly_with_derivative(p: CharPoly, lam: float) -> tuple[float, float]:
    """Value and first derivative at ``lam`` in one Horner pass."""
    u = lam * lam
    q = 1.0
    dq = 0.0
    sign = -1.0
    for phi in p.even_coeffs:
        dq = dq * u + q
        q = q * u + sign * phi
        sign = -sign
    if p.odd_parity:
        return q * lam, q + 2.0 * u * dq
    return q, 2.0 * lam * dq
