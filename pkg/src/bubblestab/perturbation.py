"""(eps, sigma)-perturbations of a standard double bubble.

Each interface k is replaced by the arc ``r_k (1 + u_k) e^{i phi}`` in its own
frame (the flat interface of the equal-mass bubble by ``x = r v0(y / r)``), and
the whole cluster is then dilated by ``1 + sigma`` about the midpoint of the
singular points.  Sign conventions: ``u1 > 0`` enlarges chamber 1, ``u2 > 0``
enlarges chamber 2, and ``u0 > 0`` (or ``v0 > 0``) moves the interface into
chamber 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import geometry
from .errors import GateError, InfeasibleCorrection, PerturbationTooLarge
from .geometry import SEGMENT_HALF, StandardBubble
from .profiles import (ArcProfile, arc_length_excess, moments, sector_area_delta,
                       segment_length_excess)

DEFAULT_EPS = 0.05
DEFAULT_SIGMA_CAP = 0.05
VOLUME_RTOL = 1e-10


def interface_half_width(base: StandardBubble) -> float:
    return SEGMENT_HALF if base.equal_mass else base.theta0


@dataclass(frozen=True, eq=False)
class PerturbedBubble:
    base: StandardBubble
    sigma: float
    profile0: ArcProfile
    profile1: ArcProfile
    profile2: ArcProfile

    @property
    def profiles(self) -> tuple[ArcProfile, ArcProfile, ArcProfile]:
        return (self.profile0, self.profile1, self.profile2)

    def gate(self, eps: float = DEFAULT_EPS, sigma_cap: float = DEFAULT_SIGMA_CAP) -> None:
        for k, p in enumerate(self.profiles):
            sup = moments(p).supbound
            if sup > eps:
                raise GateError(f"profile {k}: sup bound {sup:.6g} > eps {eps}")
        if abs(self.sigma) > sigma_cap:
            raise GateError(f"|sigma| = {abs(self.sigma):.6g} > cap {sigma_cap}")

    def chambers(self, samples: int = 1024) -> tuple[np.ndarray, np.ndarray]:
        """Chamber polylines in the singular-midpoint frame, dilation applied."""
        b = self.base
        curves = geometry.interface_curves(b, samples, self.profile0,
                                           self.profile1, self.profile2)
        shift = geometry.midpoint_offset(b)
        f = 1.0 + self.sigma
        ch1, ch2 = geometry.chambers_from_curves(*curves)
        return f * (ch1 + shift), f * (ch2 + shift)


def unperturbed(base: StandardBubble, sigma: float = 0.0) -> PerturbedBubble:
    """The reference bubble, optionally dilated about the singular midpoint."""
    return PerturbedBubble(base, sigma,
                           ArcProfile.zero(interface_half_width(base)),
                           ArcProfile.zero(base.theta1),
                           ArcProfile.zero(base.theta2))


def volumes(pb: PerturbedBubble) -> tuple[float, float]:
    b = pb.base
    f = (1.0 + pb.sigma) ** 2
    d1 = sector_area_delta(pb.profile1)
    d2 = sector_area_delta(pb.profile2)
    if b.equal_mass:
        shift = b.r1 ** 2 * moments(pb.profile0).mean
        return (f * (b.m1 + b.r1 ** 2 * d1 + shift),
                f * (b.m2 + b.r2 ** 2 * d2 - shift))
    d0 = b.r0 ** 2 * sector_area_delta(pb.profile0)
    return (f * (b.m1 + b.r1 ** 2 * d1 + d0),
            f * (b.m2 + b.r2 ** 2 * d2 - d0))


def _smaller_root(a: float, bq: float, c: float) -> float:
    """Root of a x^2 + bq x + c = 0 with smaller modulus (a > 0)."""
    disc = bq * bq - 4.0 * a * c
    if disc < 0.0:
        raise InfeasibleCorrection(
            f"interface correction has no real root (discriminant {disc:.3e})")
    if c == 0.0:
        return 0.0
    q = -0.5 * (bq + math.copysign(math.sqrt(disc), bq))
    return c / q


def enforce_volumes(base: StandardBubble, profile0: ArcProfile, profile1: ArcProfile,
                    profile2: ArcProfile, bump_mode: int = 1, eps: float = DEFAULT_EPS,
                    sigma_cap: float = DEFAULT_SIGMA_CAP) -> PerturbedBubble:
    """Restore both chamber areas by a dilation and an interface correction.

    The summed constraint r1^2 I1 + r2^2 I2 = (m1 + m2)((1+sigma)^-2 - 1)
    fixes sigma from the outer arcs alone.  The interface profile then gets
    ``delta * phi_bump`` added, with ``delta`` the smaller root of the scalar
    quadratic that makes the chamber-1 constraint exact (a linear equation
    for the flat interface).
    """
    PerturbedBubble(base, 0.0, profile0, profile1, profile2).gate(eps, math.inf)
    i1 = sector_area_delta(profile1)
    i2 = sector_area_delta(profile2)
    r0, r1, r2 = base.radii
    theta = profile0.half_width
    bump = ArcProfile.single(theta, bump_mode, 1.0)
    bump_mean = float(bump.basis_means()[-1])
    c_old = profile0.coeffs[bump_mode - 1] if profile0.modes >= bump_mode else 0.0

    if base.equal_mass:
        x = r1 * r1 * (i1 + i2) / (base.m1 + base.m2)
        target = 0.5 * (i2 - i1)
        if bump_mean == 0.0:
            raise InfeasibleCorrection(f"bump mode {bump_mode} has zero mean")
        delta = (target - moments(profile0).mean) / bump_mean
    else:
        x = (r1 * r1 * i1 + r2 * r2 * i2) / (base.m1 + base.m2)
        target = (x * base.m1 - r1 * r1 * i1) / (r0 * r0)
        gap = sector_area_delta(profile0) - target
        delta = _smaller_root(0.5 * theta, bump_mean + theta * c_old, gap)

    radicand = 1.0 + x
    if radicand <= 0.0:
        raise PerturbationTooLarge(f"dilation radicand {radicand:.3e} <= 0")
    sigma = radicand ** -0.5 - 1.0
    p0 = profile0.with_coeff(bump_mode, c_old + delta)
    pb = PerturbedBubble(base, sigma, p0, profile1, profile2)
    pb.gate(eps, sigma_cap)
    return pb


def volume_error(pb: PerturbedBubble) -> float:
    """Largest componentwise volume mismatch relative to m1 + m2."""
    v1, v2 = volumes(pb)
    b = pb.base
    return max(abs(v1 - b.m1), abs(v2 - b.m2)) / (b.m1 + b.m2)


def _interface_excess(pb: PerturbedBubble) -> float:
    """sum_k r_k (L_k(u_k) - L_k(0)) over the unit-radius reference curves."""
    b = pb.base
    e1 = b.r1 * arc_length_excess(pb.profile1)
    e2 = b.r2 * arc_length_excess(pb.profile2)
    if b.equal_mass:
        e0 = b.r1 * segment_length_excess(pb.profile0)
    else:
        e0 = b.r0 * arc_length_excess(pb.profile0)
    return e0 + e1 + e2


def perimeter_excess(pb: PerturbedBubble) -> float:
    """P(E) - P(E0), assembled without subtracting nearly equal numbers."""
    p_ref = pb.base.perimeter
    return pb.sigma * p_ref + (1.0 + pb.sigma) * _interface_excess(pb)


def perimeter_exact(pb: PerturbedBubble) -> float:
    return pb.base.perimeter + perimeter_excess(pb)


def quadratic_model(pb: PerturbedBubble) -> float:
    """Second-order expansion of (P(E) - P(E0)) / (1 + sigma), from moments."""
    b = pb.base
    m0, m1, m2 = (moments(p) for p in pb.profiles)
    total = 0.5 * (b.r1 * (m1.h1sq - m1.l2sq) + b.r2 * (m2.h1sq - m2.l2sq))
    if b.equal_mass:
        total += 0.5 * b.r1 * m0.h1sq
    else:
        total += 0.5 * b.r0 * (m0.h1sq - m0.l2sq)
    return total + 0.5 * pb.sigma ** 2 * b.perimeter


class DeficitBreakdown(NamedTuple):
    exact_perimeter: float
    deficit: float
    quadratic_model: float
    residual: float


def deficit(pb: PerturbedBubble) -> DeficitBreakdown:
    p_ref = pb.base.perimeter
    excess = perimeter_excess(pb)
    model = quadratic_model(pb)
    scaled = excess / (1.0 + pb.sigma)
    return DeficitBreakdown(exact_perimeter=p_ref + excess, deficit=excess / p_ref,
                            quadratic_model=model, residual=scaled - model)


def signed_area_changes(pb: PerturbedBubble) -> tuple[float, float, float]:
    """(I0, I1, I2); for the flat interface I0 is int v0."""
    i0 = (moments(pb.profile0).mean if pb.base.equal_mass
          else sector_area_delta(pb.profile0))
    return i0, sector_area_delta(pb.profile1), sector_area_delta(pb.profile2)
