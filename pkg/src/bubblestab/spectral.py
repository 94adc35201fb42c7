"""One-dimensional Poincare-type problems on (-theta, theta).

Closed forms for the mean-constrained infimum of int (u')^2 - u^2 and the
Fuglede-type coercivity estimate, together with a sine-Galerkin solver that
serves as an independent check of the closed forms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import null_space

from .errors import DomainError, UnboundedBelow, VerificationFailure
from .profiles import ArcProfile, moments

_SERIES_CUTOFF = 1e-2


def sin_minus_theta_cos(theta: float) -> float:
    """sin(t) - t cos(t), with a Taylor series near 0 to avoid cancellation."""
    if abs(theta) < _SERIES_CUTOFF:
        t2 = theta * theta
        return theta * t2 * (1.0 / 3.0 - t2 * (1.0 / 30.0 - t2 * (1.0 / 840.0 - t2 / 45360.0)))
    return math.sin(theta) - theta * math.cos(theta)


def _check_angle(theta: float) -> None:
    if not 0.0 < theta < math.pi:
        raise DomainError(f"theta must lie in (0, pi), got {theta!r}")


def g_value(theta: float) -> float:
    """cos(theta) / (2 (sin(theta) - theta cos(theta))) on (0, pi)."""
    _check_angle(theta)
    return math.cos(theta) / (2.0 * sin_minus_theta_cos(theta))


@dataclass(frozen=True)
class ConstrainedInfimum:
    """inf { int (u')^2 - u^2 : u in W^{1,2}_0(-theta, theta), int u = s }.

    The minimiser is ``coeff * (1 - cos t / cos theta)``, or ``coeff * cos t``
    when theta = pi/2 (flagged by ``degenerate``).
    """

    theta: float
    s: float
    value: float
    coeff: float
    degenerate: bool = False

    def minimizer(self, t):
        t = np.asarray(t, dtype=float)
        if self.degenerate:
            return self.coeff * np.cos(t)
        return self.coeff * (1.0 - np.cos(t) / math.cos(self.theta))

    def minimizer_deriv(self, t):
        t = np.asarray(t, dtype=float)
        if self.degenerate:
            return -self.coeff * np.sin(t)
        return self.coeff * np.sin(t) / math.cos(self.theta)


def constrained_infimum(theta: float, s: float) -> ConstrainedInfimum:
    _check_angle(theta)
    value = g_value(theta) * s * s
    if theta == math.pi / 2:
        return ConstrainedInfimum(theta, s, 0.0, 0.5 * s, degenerate=True)
    coeff = s / (2.0 * (theta - math.tan(theta)))
    return ConstrainedInfimum(theta, s, value, coeff)


def galerkin_system(theta: float, modes: int) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal energy weights a_j and mean weights b_j of the sine basis."""
    j = np.arange(1, modes + 1)
    a = theta * ((j * math.pi / (2.0 * theta)) ** 2 - 1.0)
    b = np.where(j % 2 == 1, 4.0 * theta / (j * math.pi), 0.0)
    return a, b


class GalerkinSolution(NamedTuple):
    value: float
    coeffs: np.ndarray
    restricted_min_eig: float


def galerkin_solve(theta: float, s: float, modes: int) -> GalerkinSolution:
    """Minimise sum a_j c_j^2 subject to sum b_j c_j = s via the KKT system."""
    _check_angle(theta)
    if modes < 1:
        raise DomainError(f"modes must be positive, got {modes}")
    a, b = galerkin_system(theta, modes)
    z = null_space(b[None, :])
    if z.shape[1]:
        hess = z.T @ (a[:, None] * z)
        restricted = float(np.linalg.eigvalsh(hess).min())
    else:
        restricted = math.inf
    if restricted < -1e-12 * max(1.0, float(np.abs(a).max())):
        raise UnboundedBelow(
            f"energy is unbounded below on the constraint plane (eig {restricted:.3e})")
    kkt = np.zeros((modes + 1, modes + 1))
    kkt[np.arange(modes), np.arange(modes)] = 2.0 * a
    kkt[:modes, modes] = b
    kkt[modes, :modes] = b
    rhs = np.zeros(modes + 1)
    rhs[modes] = s
    sol = np.linalg.solve(kkt, rhs)
    c = sol[:modes]
    return GalerkinSolution(float(a @ (c * c)), c, restricted)


def galerkin_infimum(theta: float, s: float, modes: int) -> float:
    if modes < 8:
        raise DomainError(f"galerkin_infimum needs modes >= 8, got {modes}")
    return galerkin_solve(theta, s, modes).value


def dirichlet_eig_min(theta: float, modes: int = 1) -> float:
    """Smallest Dirichlet eigenvalue (pi / (2 theta))^2 of -d^2/dx^2 on (-theta, theta).

    Cross-checked against the Rayleigh quotient of the first sine mode.
    """
    if modes < 1:
        raise DomainError(f"modes must be positive, got {modes}")
    exact = (math.pi / (2.0 * theta)) ** 2
    m = moments(ArcProfile.single(theta, 1, 1.0))
    if abs(m.h1sq / m.l2sq - exact) > 1e-12 * exact:
        raise VerificationFailure("first-mode Rayleigh quotient disagrees with (pi/2theta)^2")
    return exact


def fuglede_M(theta: float) -> float:
    """Mean-suppression threshold 2 pi^2 / (theta (pi^2 - theta^2))."""
    _check_angle(theta)
    return 2.0 * math.pi ** 2 / (theta * (math.pi ** 2 - theta ** 2))


class FugledeCheck(NamedTuple):
    holds_hypothesis: bool
    lhs: float
    rhs: float


def fuglede_check(theta: float, p: ArcProfile, rtol: float = 1e-12,
                  strict: bool = True) -> FugledeCheck:
    """Evaluate the Fuglede-type estimate for ``p`` and enforce it when it applies.

    Hypothesis: (int u)^2 <= int u^2 / M(theta).  Conclusion:
    int (u')^2 - u^2 >= (1/4)(1 - theta^2/pi^2) int (u')^2
                        + (1/2)(pi^2/theta^2 - 1) int u^2.

    With ``strict`` a violation under the hypothesis raises; otherwise the
    caller inspects ``lhs`` and ``rhs``.
    """
    if p.half_width != theta:
        raise DomainError("profile interval does not match theta")
    m = moments(p)
    holds = m.mean ** 2 <= m.l2sq / fuglede_M(theta)
    lhs = m.h1sq - m.l2sq
    rhs = (0.25 * (1.0 - theta ** 2 / math.pi ** 2) * m.h1sq
           + 0.5 * (math.pi ** 2 / theta ** 2 - 1.0) * m.l2sq)
    if strict and holds and lhs < rhs - rtol * max(abs(lhs), abs(rhs), 1e-300):
        raise VerificationFailure(
            f"Fuglede estimate violated at theta={theta!r}: {lhs!r} < {rhs!r}")
    return FugledeCheck(holds, lhs, rhs)


def mean_lower_bound(p: ArcProfile) -> tuple[float, float]:
    """Both sides of int (u')^2 - u^2 >= (1 - (theta/pi)^2) int (u')^2 - (int u)^2 / (2 theta)."""
    theta = p.half_width
    m = moments(p)
    return (m.h1sq - m.l2sq,
            (1.0 - (theta / math.pi) ** 2) * m.h1sq - m.mean ** 2 / (2.0 * theta))
