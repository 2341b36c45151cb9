"""Zeros of residual polynomials and moduli of convergence.

Root location is sign-change bracketing on a scan grid followed by
bisection: degrees reach several hundred and only real roots inside a
known interval are needed, so this is unconditionally robust (no
companion matrices).  The scan grid is uniform in the angular variable
x = cos(theta) with 50 points per degree; oscillations of a degree-n
family are ~pi/n apart in theta, so adjacent roots and extrema are
separated by ~50 grid points even where they cluster near the endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .orthopoly import CoDilation, RecurrenceScheme, ResidualKind, eval_monic, residual_eval

__all__ = ["ZeroReport", "find_zeros", "find_polynomial_zeros", "modulus_of_convergence"]

GRID_POINTS_PER_DEGREE = 50
BISECTION_TOL = 1e-13
REFINE_TOL = 1e-10


@dataclass(frozen=True)
class ZeroReport:
    """Located roots in ascending order; fewer than ``degree`` roots means
    some left the scanned interval (dilation beyond critical), which is
    informative rather than an error."""

    degree: int
    lam: float
    zeros: np.ndarray

    @property
    def smallest(self) -> float:
        return float(self.zeros[0])


def _residual_grid(n: int) -> np.ndarray:
    """Scan grid for residual polynomials: y = (1 - cos(theta))/2.

    Covers both kinds: the symmetric argument is 1 - 2y = cos(theta) and
    the asymmetric one is sqrt(1 - y) = cos(theta/2), so oscillations are
    ~pi/n apart in theta either way.
    """
    theta = np.linspace(0.0, np.pi, GRID_POINTS_PER_DEGREE * n + 1)
    grid = 0.5 * (1.0 - np.cos(theta))
    grid[0], grid[-1] = 0.0, 1.0
    return grid


def _bisect_all(fn, lo, hi, flo):
    """Vectorised bisection on brackets [lo_i, hi_i] with f(lo_i) = flo_i."""
    lo = lo.copy()
    hi = hi.copy()
    flo = flo.copy()
    while np.max(hi - lo) > BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        same = (fm > 0) == (flo > 0)
        lo = np.where(same, mid, lo)
        flo = np.where(same, fm, flo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


def _scan_roots(fn, grid):
    """All sign-change roots of fn on the ascending grid, refined by bisection."""
    vals = fn(grid)
    roots = [grid[i] for i in np.nonzero(vals == 0.0)[0]]
    sign = np.sign(vals)
    change = np.nonzero((sign[:-1] * sign[1:]) < 0)[0]
    if change.size:
        refined = _bisect_all(fn, grid[change], grid[change + 1], vals[change])
        roots.extend(refined.tolist())
    return np.sort(np.asarray(roots, dtype=float))


def find_zeros(
    scheme: RecurrenceScheme,
    dilation: CoDilation | None,
    kind: ResidualKind,
    n: int,
) -> ZeroReport:
    """Roots of the degree-n residual polynomial in [0, 1]."""
    if n < 1:
        raise ValueError("degree must be >= 1")
    grid = _residual_grid(n)

    def fn(y):
        return residual_eval(scheme, dilation, kind, n, y)

    zeros = _scan_roots(fn, grid)
    return ZeroReport(degree=n, lam=dilation.lam if dilation else 1.0, zeros=zeros)


def find_polynomial_zeros(
    scheme: RecurrenceScheme, dilation: CoDilation | None, n: int
) -> ZeroReport:
    """Roots of P_n itself (co-dilated if requested) in [-1, 1]."""
    if n < 1:
        raise ValueError("degree must be >= 1")
    theta = np.linspace(np.pi, 0.0, GRID_POINTS_PER_DEGREE * n + 1)
    grid = np.cos(theta)
    grid[0], grid[-1] = -1.0, 1.0

    def fn(x):
        return eval_monic(scheme, dilation, n, x)

    zeros = _scan_roots(fn, grid)
    return ZeroReport(degree=n, lam=dilation.lam if dilation else 1.0, zeros=zeros)


def _golden_max(fn, lo, hi, tol):
    """Golden-section maximisation of fn on [lo, hi]."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(d)
    return max(fc, fd)


def modulus_of_convergence(
    scheme: RecurrenceScheme,
    dilation: CoDilation | None,
    kind: ResidualKind,
    n: int,
    s: float,
    symmetric_weight: bool = False,
) -> float:
    """sup over [0, 1] of |y^(s/2) r_n(y)|, with an extra (1-y)^(s/2) factor
    when ``symmetric_weight`` is set.

    Approximated on the angular scan grid with golden-section refinement
    around the grid maximum.
    """
    if n < 1:
        raise ValueError("degree must be >= 1")
    if s < 0:
        raise ValueError("smoothness s must be >= 0")
    grid = _residual_grid(n)

    def fn(y):
        w = y ** (s / 2.0) if s else 1.0
        if symmetric_weight and s:
            w = w * (1.0 - y) ** (s / 2.0)
        return np.abs(w * residual_eval(scheme, dilation, kind, n, y))

    vals = fn(grid)
    i = int(np.argmax(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]
    return max(float(vals[i]), float(_golden_max(fn, lo, hi, REFINE_TOL)))
