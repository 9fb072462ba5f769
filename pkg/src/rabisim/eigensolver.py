"""Real eigenvalues of the coupling matrix.

Two routes:

* :func:`eigenvalues_closed` evaluates the algebraic solutions available for
  2 to 7 levels (square roots for n <= 5, a cubic in lam^2 handled by
  :func:`cardano_cubic` for n = 6, 7).
* :func:`eigenvalues_general` works for any n: Sturm-count bisection on the
  determinant recurrence isolates each positive root, Newton iteration on the
  characteristic polynomial polishes it, and the negative half of the
  spectrum is mirrored exactly.

The spectrum of a chain with all couplings positive is simple and symmetric
under negation (with one exact zero when n is odd), and both solvers enforce
that structure.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .charpoly import (
    CharPoly,
    char_poly_recurrence,
    eval_char_poly,
    eval_char_poly_with_derivative,
    gershgorin_radius,
)
from .exceptions import ConvergenceError, NonRealRootsError, NumericalError
from .validation import check_couplings

__all__ = [
    "Spectrum",
    "CubicRoots",
    "cardano_cubic",
    "eigenvalues_closed",
    "eigenvalues_general",
    "sturm_count_below",
]

_MAX_NEWTON_ITER = 60
_MAX_BISECT_ITER = 200
DEFAULT_TOL = 1e-13  # relative to the Gershgorin radius


@dataclass(frozen=True, eq=False)
class Spectrum:
    """All eigenvalues of a coupling matrix, sorted descending.

    ``gap_min`` caches the smallest pairwise separation; the spectral
    interpolation downstream divides by eigenvalue differences and needs it.
    """

    eigenvalues: np.ndarray
    gap_min: float

    @classmethod
    def from_values(cls, values, check_symmetry: bool = True) -> "Spectrum":
        vals = np.sort(np.asarray(values, dtype=float))[::-1].copy()
        if vals.size < 2:
            raise ValueError("Spectrum: need at least two eigenvalues")
        if not np.all(np.isfinite(vals)):
            raise ValueError("Spectrum: eigenvalues must be finite and real")
        scale = max(1.0, float(np.abs(vals).max()))
        if check_symmetry and np.max(np.abs(vals + vals[::-1])) > 1e-9 * scale:
            raise ValueError("Spectrum: eigenvalues are not symmetric under negation")
        gap = float(np.min(np.diff(vals[::-1])))
        vals.flags.writeable = False
        return cls(eigenvalues=vals, gap_min=gap)

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    @property
    def scale(self) -> float:
        """Spectral radius (largest magnitude eigenvalue)."""
        return float(np.abs(self.eigenvalues).max())


@dataclass(frozen=True)
class CubicRoots:
    """Real roots of x^3 - a*x^2 + b*x - c, descending, with intermediates."""

    x1: float
    x2: float
    x3: float
    p: float
    q: float
    discriminant: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3])


def cardano_cubic(a: float, b: float, c: float) -> CubicRoots:
    """Solve x^3 - a*x^2 + b*x - c = 0 for three real roots.

    Depressed-cubic route: with p = b/3 - a^2/9 and q = -c + ab/3 - 2a^3/27,
    the roots are u0 + v0 + a/3 and its two rotations by the primitive cube
    root of unity, where u0^3 = (-q + sqrt(q^2 + 4p^3))/2 and v0 is paired so
    that u0*v0 = -p. Three real roots require q^2 + 4p^3 <= 0; a positive
    discriminant (beyond roundoff slack) raises :class:`NonRealRootsError`.

    A short guarded Newton polish is applied to each root: the closed form
    loses relative accuracy on a root much smaller than the others, and the
    polish restores it for roughly the cost of one extra evaluation.
    """

    def residual(x: float) -> float:
        return ((x - a) * x + b) * x - c

    p = b / 3.0 - a * a / 9.0
    q = -c + a * b / 3.0 - 2.0 * a**3 / 27.0
    disc = q * q + 4.0 * p**3
    slack = 1e-10 * max(1.0, q * q, abs(4.0 * p**3))
    if disc > slack:
        raise NonRealRootsError(
            f"cubic has complex roots (discriminant {disc:.3e} > 0); "
            "not a valid coupling spectrum"
        )
    root_disc = cmath.sqrt(complex(disc, 0.0))
    u0 = (0.5 * (-q + root_disc)) ** (1.0 / 3.0)
    if abs(u0) > 1e-300:
        v0 = -p / u0  # branch pairing that keeps the roots real
    else:
        v0 = 0.0 + 0.0j  # p ~ q ~ 0: triple root at a/3
    sigma = cmath.exp(2j * cmath.pi / 3.0)
    third = a / 3.0
    raw = [
        u0 + v0 + third,
        sigma * u0 + sigma**2 * v0 + third,
        sigma**2 * u0 + sigma * v0 + third,
    ]
    scale = max(1.0, abs(u0) + abs(v0) + abs(third))
    if max(abs(z.imag) for z in raw) > 1e-10 * scale:
        raise NonRealRootsError("cube-root branches failed to cancel imaginary parts")
    roots = []
    for z in raw:
        x = z.real
        for _ in range(3):
            f = residual(x)
            df = (3.0 * x - 2.0 * a) * x + b
            if df == 0.0:
                break
            step = f / df
            x_new = x - step
            if abs(residual(x_new)) >= abs(f):
                break
            x = x_new
        roots.append(x)
    roots.sort(reverse=True)
    tol = 1e-10 * max(1.0, abs(a) ** 3)
    if any(abs(residual(x)) > tol for x in roots):
        raise NumericalError("cubic roots failed the residual check")
    return CubicRoots(
        x1=roots[0], x2=roots[1], x3=roots[2], p=p, q=q, discriminant=disc
    )


def _closed_squares_6(gsq: np.ndarray) -> tuple[float, float, float]:
    # 5 couplings; written out exactly as the degree-3 even-part coefficients
    a = float(gsq.sum())
    b = float(
        gsq[0] * gsq[2]
        + gsq[0] * gsq[3]
        + gsq[0] * gsq[4]
        + gsq[1] * gsq[3]
        + gsq[1] * gsq[4]
        + gsq[2] * gsq[4]
    )
    c = float(gsq[0] * gsq[2] * gsq[4])
    return a, b, c


def _closed_squares_7(gsq: np.ndarray) -> tuple[float, float, float]:
    # 6 couplings
    a = float(gsq.sum())
    b = float(
        gsq[0] * gsq[2]
        + gsq[0] * gsq[3]
        + gsq[0] * gsq[4]
        + gsq[0] * gsq[5]
        + gsq[1] * gsq[3]
        + gsq[1] * gsq[4]
        + gsq[1] * gsq[5]
        + gsq[2] * gsq[4]
        + gsq[2] * gsq[5]
        + gsq[3] * gsq[5]
    )
    c = float(
        gsq[0] * gsq[2] * gsq[4]
        + gsq[0] * gsq[2] * gsq[5]
        + gsq[0] * gsq[3] * gsq[5]
        + gsq[1] * gsq[3] * gsq[5]
    )
    return a, b, c


def eigenvalues_closed(couplings) -> Spectrum:
    """Closed-form spectrum for 2 to 7 levels.

    Each case assembles the exact plus/minus pairs (plus a zero for odd n)
    from radicals; n = 6 and 7 go through :func:`cardano_cubic` on the
    substitution x = lam^2.
    """
    g = check_couplings(couplings)
    n = g.size + 1
    if not 2 <= n <= 7:
        raise ValueError(f"closed-form eigenvalues cover n in [2, 7]; got n={n}")
    gsq = g * g
    if n == 2:
        pos = [float(g[0])]
    elif n == 3:
        pos = [float(np.hypot(g[0], g[1]))]
    elif n == 4:
        big = gsq[1] + (g[0] + g[2]) ** 2
        small = gsq[1] + (g[0] - g[2]) ** 2
        pos = [0.5 * (np.sqrt(big) + np.sqrt(small)), 0.5 * (np.sqrt(big) - np.sqrt(small))]
    elif n == 5:
        s = gsq.sum()
        d = 2.0 * np.sqrt(gsq[0] * gsq[2] + gsq[0] * gsq[3] + gsq[1] * gsq[3])
        pos = [0.5 * (np.sqrt(s + d) + np.sqrt(s - d)), 0.5 * (np.sqrt(s + d) - np.sqrt(s - d))]
    else:
        a, b, c = _closed_squares_6(gsq) if n == 6 else _closed_squares_7(gsq)
        cubic = cardano_cubic(a, b, c)
        if cubic.x3 <= 0.0:
            raise NumericalError(
                "squared-eigenvalue cubic produced a non-positive root"
            )
        pos = [np.sqrt(cubic.x1), np.sqrt(cubic.x2), np.sqrt(cubic.x3)]
    pos = [float(x) for x in pos]
    values = pos + ([0.0] if n % 2 else []) + [-x for x in pos]
    return Spectrum.from_values(values)


def sturm_count_below(couplings, lam: float) -> int:
    """Number of eigenvalues of the coupling matrix strictly below ``lam``.

    Evaluates the determinant recurrence chain f_0 .. f_n at ``lam`` and
    counts sign agreements between consecutive members. A chain value that is
    exactly zero takes the opposite sign of its predecessor, which is the
    exact-arithmetic equivalent of nudging ``lam`` by one ulp.
    """
    g = check_couplings(couplings)
    gsq = g * g
    agreements = 0
    f_prev, f_cur = 1.0, float(lam)
    sign_prev = 1
    sign_cur = (1 if f_cur > 0 else -1) if f_cur != 0.0 else -sign_prev
    if sign_cur == sign_prev:
        agreements += 1
    for k in range(2, g.size + 2):
        f_next = lam * f_cur - gsq[k - 2] * f_prev
        sign_next = (1 if f_next > 0 else -1) if f_next != 0.0 else -sign_cur
        if sign_next == sign_cur:
            agreements += 1
        f_prev, f_cur = f_cur, f_next
        sign_prev, sign_cur = sign_cur, sign_next
        # keep magnitudes in range for large n / large lam
        mag = max(abs(f_prev), abs(f_cur))
        if mag > 1e250:
            f_prev /= mag
            f_cur /= mag
    return agreements


def _polish_root(p: CharPoly, lo: float, hi: float, f_lo: float, tol_abs: float) -> float:
    """Newton with bisection fallback on a bracket holding exactly one root."""
    x = 0.5 * (lo + hi)
    for _ in range(_MAX_NEWTON_ITER):
        f, df = eval_char_poly_with_derivative(p, x)
        if f == 0.0:
            return x
        # shrink the bracket using the sign of f at x
        if (f > 0) == (f_lo > 0):
            lo = x
        else:
            hi = x
        if df != 0.0:
            step = f / df
            x_new = x - step
        else:
            step = hi - lo
            x_new = 0.5 * (lo + hi)
        if not lo < x_new < hi:  # Newton left the bracket: bisect instead
            step = 0.5 * (hi - lo)
            x_new = lo + step
        if abs(step) <= tol_abs or hi - lo <= tol_abs:
            return x_new
        x = x_new
    raise ConvergenceError("Newton polish did not converge within the iteration cap")


def eigenvalues_general(couplings, tol: float = DEFAULT_TOL) -> Spectrum:
    """Spectrum for any number of levels via Sturm bisection plus Newton polish.

    Only the positive eigenvalues are solved for; the negative half is their
    exact mirror and the zero eigenvalue of an odd chain is inserted exactly
    (it is a root of the analytic factor lam, never searched for).

    ``tol`` is relative to the Gershgorin radius of the matrix.
    """
    g = check_couplings(couplings)
    if not tol > 0.0:
        raise ValueError("tol: must be positive")
    n = g.size + 1
    m = n // 2
    p = char_poly_recurrence(g)
    radius = gershgorin_radius(g)
    tol_abs = tol * radius
    hi0 = radius * (1.0 + 1e-9)

    def count(lam: float) -> int:
        return sturm_count_below(g, lam)

    positives = []
    base = n - m  # ascending index of the smallest positive eigenvalue
    for j in range(m):
        target = base + j
        lo, hi = 0.0, hi0
        c_lo, c_hi = count(lo), n
        iters = 0
        # Sturm bisection until (lo, hi] brackets exactly the target root
        while not (c_lo == target and c_hi == target + 1):
            mid = 0.5 * (lo + hi)
            c_mid = count(mid)
            if c_mid <= target:
                lo, c_lo = mid, c_mid
            else:
                hi, c_hi = mid, c_mid
            iters += 1
            if iters > _MAX_BISECT_ITER:
                raise ConvergenceError(
                    "Sturm bisection failed to isolate an eigenvalue "
                    "(pathologically close roots?)"
                )
        f_lo = eval_char_poly(p, lo)
        if f_lo == 0.0:  # endpoint landed exactly on the root
            positives.append(lo)
            continue
        positives.append(_polish_root(p, lo, hi, f_lo, tol_abs))
    positives.sort()
    values = [-x for x in reversed(positives)] + ([0.0] if n % 2 else []) + positives
    return Spectrum.from_values(values)
