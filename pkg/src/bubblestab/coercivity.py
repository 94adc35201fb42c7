"""Coefficients of the 2x2 quadratic forms controlling the constrained second variation.

For unequal masses the form acts on (sqrt(r1) I1, sqrt(r2) I2) with entries
(b1, b3; b3, b2); for equal masses it acts on (I1, I2) with (a1, a3; a3, a2).
Positivity of min{b1, b1 b2 - b3^2} over r1 in (0, 1) is established here the
same way it is in the literature: by a dense scan.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geometry
from .errors import DomainError, VerificationFailure
from .geometry import SEGMENT_HALF, TWO_PI_3, StandardBubble
from .spectral import g_value


@dataclass(frozen=True)
class FormCoefficients:
    c1: float
    c2: float
    c3: float

    @property
    def det(self) -> float:
        return self.c1 * self.c2 - self.c3 ** 2

    @property
    def eigen_min(self) -> float:
        half_tr = 0.5 * (self.c1 + self.c2)
        return half_tr - math.hypot(0.5 * (self.c1 - self.c2), self.c3)

    @property
    def eigen_max(self) -> float:
        half_tr = 0.5 * (self.c1 + self.c2)
        return half_tr + math.hypot(0.5 * (self.c1 - self.c2), self.c3)

    def matrix(self) -> np.ndarray:
        return np.array([[self.c1, self.c3], [self.c3, self.c2]])

    def quadratic(self, x, y):
        return self.c1 * x * x + self.c2 * y * y + 2.0 * self.c3 * x * y


def beta_coeffs_for(b: StandardBubble) -> FormCoefficients:
    """(b1, b2, b3) for an arbitrary (possibly rescaled) unequal-mass bubble."""
    if b.equal_mass:
        raise DomainError("beta coefficients need m2 > m1; use alpha_coeffs()")
    r0, r1, r2 = b.radii
    mt2 = (b.m1 + b.m2) ** 2
    p_ref = b.perimeter
    g0 = g_value(b.theta0)
    b1 = g0 * (r1 / r0) ** 3 * b.m2 ** 2 / mt2 + g_value(b.theta1) + r1 ** 3 / 4 * p_ref / mt2
    b2 = g0 * (r2 / r0) ** 3 * b.m1 ** 2 / mt2 + g_value(b.theta2) + r2 ** 3 / 4 * p_ref / mt2
    cross = (r1 * r2) ** 1.5
    b3 = -g0 * cross / r0 ** 3 * b.m1 * b.m2 / mt2 + cross / 4 * p_ref / mt2
    return FormCoefficients(b1, b2, b3)


def beta_coeffs(r1: float) -> FormCoefficients:
    if not 0.0 < r1 < 1.0:
        raise DomainError(f"r1 must lie in (0, 1), got {r1!r}")
    return beta_coeffs_for(geometry.from_r1(r1))


def alpha_coeffs() -> FormCoefficients:
    """(a1, a2, a3) of the equal-mass form at r = 1; both minors must be positive."""
    m = geometry.equal_from_radius(1.0).m1
    g_seg = g_value(SEGMENT_HALF)
    a1 = 0.25 * g_seg + g_value(TWO_PI_3) + 0.5 / m
    a3 = -0.25 * g_seg + 0.5 / m
    fc = FormCoefficients(a1, a1, a3)
    if not (fc.c1 > 0 and fc.det > 0):
        raise VerificationFailure(f"equal-mass form is not positive definite: {fc}")
    return fc


def form_lower_bound(fc: FormCoefficients, x: float, y: float, rtol: float = 1e-12) -> bool:
    """Whether c1 x^2 + c2 y^2 + 2 c3 x y >= eigen_min (x^2 + y^2) (up to rounding)."""
    q = fc.quadratic(x, y)
    bound = fc.eigen_min * (x * x + y * y)
    scale = max(abs(fc.c1), abs(fc.c2), abs(fc.c3)) * (x * x + y * y)
    return q >= bound - rtol * scale


SCAN_COLUMNS = ("r", "b1", "b2", "b3", "det", "det_over_r", "eigen_min")


@dataclass(frozen=True)
class ScanResult:
    beta_star: float
    argmin: float
    table: np.ndarray  # rows of SCAN_COLUMNS, sorted by r
    lipschitz: np.ndarray  # empirical max |db_i/dr| for b1, b2, b3

    def records(self) -> list[dict]:
        return [dict(zip(SCAN_COLUMNS, map(float, row))) for row in self.table]


def _scan_rows(rs: np.ndarray) -> np.ndarray:
    rows = np.empty((rs.size, len(SCAN_COLUMNS)))
    for i, r in enumerate(rs):
        fc = beta_coeffs(float(r))
        rows[i] = (r, fc.c1, fc.c2, fc.c3, fc.det, fc.det / r, fc.eigen_min)
    return rows


def beta_star_scan(grid: int = 10_000, refine: int = 10) -> ScanResult:
    """Scan r = i / (grid + 1) and report min over the scan of min{b1, det}.

    The neighbourhood of the minimising grid point is re-sampled ``refine``
    times more densely; refinement rows are merged into the table.
    """
    if grid < 100:
        raise DomainError(f"grid must be >= 100, got {grid}")
    rs = np.arange(1, grid + 1) / (grid + 1)
    rows = _scan_rows(rs)
    crit = np.minimum(rows[:, 1], rows[:, 4])
    k = int(np.argmin(crit))
    if refine > 1:
        lo = rs[max(k - 1, 0)]
        hi = rs[min(k + 1, grid - 1)]
        fine = np.linspace(lo, hi, 2 * refine + 1)[1:-1]
        fine = fine[~np.isin(fine, rs)]
        rows = np.vstack([rows, _scan_rows(fine)])
        rows = rows[np.argsort(rows[:, 0], kind="stable")]
        crit = np.minimum(rows[:, 1], rows[:, 4])
        k = int(np.argmin(crit))
    beta_star = float(crit[k])
    dr = np.diff(rows[:, 0])
    lips = np.abs(np.diff(rows[:, 1:4], axis=0)) / dr[:, None]
    if not beta_star > 0:
        raise VerificationFailure(
            f"min{{b1, b1 b2 - b3^2}} = {beta_star!r} <= 0 at r1 = {rows[k, 0]!r}")
    return ScanResult(beta_star=beta_star, argmin=float(rows[k, 0]), table=rows,
                      lipschitz=lips.max(axis=0))


def det_slope(r_lo: float = 0.005, r_hi: float = 0.05, points: int = 64) -> float:
    """Least-squares log-log slope of b1 b2 - b3^2 against r on [r_lo, r_hi]."""
    rs = np.geomspace(r_lo, r_hi, points)
    dets = np.array([beta_coeffs(float(r)).det for r in rs])
    return float(np.polyfit(np.log(rs), np.log(dets), 1)[0])
