"""Reference standard double bubbles in the plane.

A standard double bubble is made of three circular arcs meeting at 120
degrees at two singular points.  With the larger radius normalised to one,
the whole configuration is a function of the radius ``r1`` of the smaller
chamber's outer arc.  The equal-mass configuration (flat interface) is a
separate branch flagged by ``equal_mass``.

Coordinates: for unequal masses :func:`embed` puts the centre ``P0`` of the
interface arc at the origin and the three centres on the x-axis.  For equal
masses the interface is the vertical segment through the origin.
:func:`midpoint_offset` converts to the frame whose origin is the midpoint of
the singular points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .errors import ConsistencyError, DomainError, NumericError

SQRT3 = math.sqrt(3.0)
TWO_PI_3 = 2.0 * math.pi / 3.0
EQUAL_MASS_FACTOR = TWO_PI_3 + SQRT3 / 4.0  # m / r^2 for equal chambers
SEGMENT_HALF = SQRT3 / 2.0  # half length of the unit flat interface

_R1_BRACKET = (1e-6, 1.0 - 1e-6)


@dataclass(frozen=True)
class StandardBubble:
    """Parameters of a standard double bubble.

    ``r0`` is ``math.inf`` in the equal-mass case; code branches on
    ``equal_mass`` and never does arithmetic with it.
    """

    r0: float
    r1: float
    r2: float
    theta0: float
    theta1: float
    theta2: float
    m1: float
    m2: float
    equal_mass: bool = False
    scale: float = 1.0

    @property
    def total_mass(self) -> float:
        return self.m1 + self.m2

    @property
    def radii(self) -> tuple[float, float, float]:
        return (self.r0, self.r1, self.r2)

    @property
    def angles(self) -> tuple[float, float, float]:
        return (self.theta0, self.theta1, self.theta2)

    @property
    def perimeter(self) -> float:
        return perimeter(self)

    def scaled(self, t: float) -> "StandardBubble":
        """Return the bubble dilated by ``t`` (angles unchanged)."""
        if not t > 0:
            raise DomainError(f"scale factor must be positive, got {t!r}")
        r0 = self.r0 if self.equal_mass else self.r0 * t
        return replace(self, r0=r0, r1=self.r1 * t, r2=self.r2 * t,
                       m1=self.m1 * t * t, m2=self.m2 * t * t,
                       scale=self.scale * t)

    def check(self, tol: float = 1e-12) -> None:
        """Raise :class:`ConsistencyError` if an invariant is violated.

        Radii relations are checked relative to ``r2``.
        """
        failures = []
        rel = self.r2
        if self.equal_mass:
            if not math.isinf(self.r0):
                failures.append("r0 must be the infinity sentinel")
            if abs(1 / self.r1 - 1 / self.r2) * rel > tol:
                failures.append("law of pressures 1/r1 = 1/r2")
            if self.theta0 != 0.0 or abs(self.theta1 - TWO_PI_3) > tol \
                    or abs(self.theta2 - TWO_PI_3) > tol:
                failures.append("equal-mass angles")
        else:
            if abs(1 / self.r1 - 1 / self.r2 - 1 / self.r0) * rel > tol:
                failures.append("law of pressures 1/r1 = 1/r2 + 1/r0")
            h0 = self.r0 * math.sin(self.theta0)
            for r, th in ((self.r1, self.theta1), (self.r2, self.theta2)):
                if abs(r * math.sin(th) - h0) > tol * rel:
                    failures.append("r_k sin(theta_k) mismatch")
            if abs(self.theta1 + self.theta0 - TWO_PI_3) > tol:
                failures.append("theta1 + theta0 = 2pi/3")
            if abs(self.theta2 - self.theta0 - TWO_PI_3) > tol:
                failures.append("theta2 - theta0 = 2pi/3")
            if not (0 < self.theta0 < math.pi / 3
                    and math.pi / 3 < self.theta1 < TWO_PI_3
                    and TWO_PI_3 < self.theta2 < math.pi):
                failures.append("angle ranges")
        if not (self.m2 >= self.m1 > 0):
            failures.append("m2 >= m1 > 0")
        if failures:
            raise ConsistencyError("; ".join(failures))


def _canonical_masses(r1: float) -> tuple[float, float, float, float]:
    """Return (r0, theta0, m1, m2) for the canonical bubble with r2 = 1."""
    r0 = r1 / (1.0 - r1)
    theta0 = math.atan(SQRT3 * (1.0 - r1) / (1.0 + r1))
    theta1 = TWO_PI_3 - theta0
    theta2 = TWO_PI_3 + theta0
    m1 = theta1 * r1 * r1 + theta0 * r0 * r0 - 0.5 * SQRT3 * r0 * r1
    m2 = theta2 - theta0 * r0 * r0 + 0.5 * SQRT3 * r0
    return r0, theta0, m1, m2


def from_r1(r1: float) -> StandardBubble:
    """Canonical bubble (r2 = 1) parametrised by the small radius ``r1``."""
    if not 0.0 < r1 < 1.0:
        raise DomainError(f"r1 must lie in (0, 1), got {r1!r}")
    r0, theta0, m1, m2 = _canonical_masses(r1)
    return StandardBubble(r0=r0, r1=r1, r2=1.0, theta0=theta0,
                          theta1=TWO_PI_3 - theta0, theta2=TWO_PI_3 + theta0,
                          m1=m1, m2=m2)


def equal_from_radius(r: float) -> StandardBubble:
    """Equal-mass bubble whose two outer arcs have radius ``r``."""
    if not r > 0:
        raise DomainError(f"radius must be positive, got {r!r}")
    m = EQUAL_MASS_FACTOR * r * r
    return StandardBubble(r0=math.inf, r1=r, r2=r, theta0=0.0,
                          theta1=TWO_PI_3, theta2=TWO_PI_3, m1=m, m2=m,
                          equal_mass=True, scale=r)


def _mass_ratio(r1: float) -> float:
    _, _, m1, m2 = _canonical_masses(r1)
    return m1 / m2


@lru_cache(maxsize=1)
def _ratio_is_monotone(samples: int = 2001) -> bool:
    grid = np.linspace(*_R1_BRACKET, samples)
    q = np.array([_mass_ratio(float(r)) for r in grid])
    return bool(np.all(np.diff(q) > 0))


def from_masses(m1: float, m2: float, tol: float = 1e-13) -> StandardBubble:
    """Standard bubble enclosing areas ``m1 <= m2``.

    The mass ratio is inverted by bisection in ``r1`` and the canonical
    bubble is then dilated so that the areas match.
    """
    if not (m2 >= m1 > 0):
        raise DomainError(f"need m2 >= m1 > 0, got ({m1!r}, {m2!r})")
    if m1 == m2:
        return equal_from_radius(math.sqrt(m1 / EQUAL_MASS_FACTOR))
    if not _ratio_is_monotone():
        raise NumericError("mass ratio m1/m2 is not monotone in r1 on the scan grid")

    target = m1 / m2
    lo, hi = _R1_BRACKET
    q_lo, q_hi = _mass_ratio(lo), _mass_ratio(hi)
    if not q_lo <= target <= q_hi:
        raise DomainError(
            f"mass ratio {target!r} outside the supported range [{q_lo!r}, {q_hi!r}] "
            f"(r1 in [{lo}, {hi}])")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _mass_ratio(mid) < target:
            lo = mid
        else:
            hi = mid
    canonical = from_r1(0.5 * (lo + hi))
    return canonical.scaled(math.sqrt(m1 / canonical.m1))


def perimeter(b: StandardBubble, rtol: float = 1e-10) -> float:
    """Total length of the three interfaces, 2 (m1/r1 + m2/r2).

    The mass formula is cross-checked against the sum of the arc lengths.
    """
    via_masses = 2.0 * (b.m1 / b.r1 + b.m2 / b.r2)
    if b.equal_mass:
        arc_sum = 2.0 * TWO_PI_3 * (b.r1 + b.r2) + SQRT3 * b.r1
    else:
        arc_sum = 2.0 * (b.theta0 * b.r0 + b.theta1 * b.r1 + b.theta2 * b.r2)
    if abs(via_masses - arc_sum) > rtol * arc_sum:
        raise ConsistencyError(
            f"perimeter mismatch: 2(m1/r1+m2/r2)={via_masses!r}, arcs={arc_sum!r}")
    return via_masses


def centers(b: StandardBubble) -> tuple[np.ndarray | None, np.ndarray, np.ndarray]:
    """Centres (P0, P1, P2) in the native frame; P0 is None for equal masses."""
    if b.equal_mass:
        return None, np.array([-0.5 * b.r1, 0.0]), np.array([0.5 * b.r2, 0.0])
    s0 = math.sin(b.theta0)
    t1 = b.r1 * math.sin(math.pi / 3) / s0
    t2 = b.r2 * math.sin(2 * math.pi / 3) / s0
    return np.zeros(2), np.array([t1, 0.0]), np.array([t2, 0.0])


def singular_points(b: StandardBubble) -> tuple[np.ndarray, np.ndarray]:
    """Upper and lower triple junctions (S, S') in the native frame."""
    if b.equal_mass:
        h = SEGMENT_HALF * b.r1
        return np.array([0.0, h]), np.array([0.0, -h])
    x = b.r0 * math.cos(b.theta0)
    y = b.r0 * math.sin(b.theta0)
    return np.array([x, y]), np.array([x, -y])


def midpoint_offset(b: StandardBubble) -> np.ndarray:
    """Translation taking the native frame to the singular-midpoint frame."""
    if b.equal_mass:
        return np.zeros(2)
    return np.array([-b.r0 * math.cos(b.theta0), 0.0])


def _zero(x: np.ndarray) -> np.ndarray:
    return np.zeros_like(x)


def interface_curves(b: StandardBubble, samples: int, u0=None, u1=None, u2=None
                     ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sample the three (possibly perturbed) interfaces in the native frame.

    ``u0``/``u1``/``u2`` are callables of the local parameter (angle, or
    height for the flat interface) returning the normal displacement in units
    of the corresponding radius.  Returns ``samples + 1`` points per curve:

    * interface 0 runs from S' up to S,
    * arc 1 runs from S to S' around chamber 1,
    * arc 2 runs from S' to S around chamber 2.
    """
    u0 = u0 or _zero
    u1 = u1 or _zero
    u2 = u2 or _zero
    _, p1, p2 = centers(b)

    if b.equal_mass:
        h = np.linspace(-SEGMENT_HALF, SEGMENT_HALF, samples + 1)
        c0 = b.r1 * np.column_stack([u0(h), h])
    else:
        phi = np.linspace(-b.theta0, b.theta0, samples + 1)
        rad = b.r0 * (1.0 + u0(phi))
        c0 = np.column_stack([rad * np.cos(phi), rad * np.sin(phi)])

    phi = np.linspace(b.theta1, -b.theta1, samples + 1)
    rad = b.r1 * (1.0 + u1(phi))
    c1 = p1 + np.column_stack([-rad * np.cos(phi), rad * np.sin(phi)])

    phi = np.linspace(-b.theta2, b.theta2, samples + 1)
    rad = b.r2 * (1.0 + u2(phi))
    c2 = p2 + np.column_stack([rad * np.cos(phi), rad * np.sin(phi)])
    return c0, c1, c2


def chambers_from_curves(c0: np.ndarray, c1: np.ndarray, c2: np.ndarray
                         ) -> tuple[np.ndarray, np.ndarray]:
    """Counter-clockwise closed polylines (no repeated vertex) of both chambers."""
    ch1 = np.vstack([c0, c1[1:-1]])
    ch2 = np.vstack([c2, c0[::-1][1:-1]])
    return ch1, ch2


def polygon_area(poly: np.ndarray) -> float:
    """Signed shoelace area of a closed polyline."""
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


@dataclass(frozen=True, eq=False)
class EmbeddedBubble:
    bubble: StandardBubble
    p0: np.ndarray | None
    p1: np.ndarray
    p2: np.ndarray
    t1: float
    t2: float
    s_upper: np.ndarray
    s_lower: np.ndarray
    chamber1: np.ndarray
    chamber2: np.ndarray

    def areas(self) -> tuple[float, float]:
        return polygon_area(self.chamber1), polygon_area(self.chamber2)


def embed(b: StandardBubble, arc_samples: int = 4096) -> EmbeddedBubble:
    """Place ``b`` in the plane and sample both chamber boundaries."""
    if arc_samples < 16:
        raise DomainError(f"arc_samples must be >= 16, got {arc_samples}")
    p0, p1, p2 = centers(b)
    s_up, s_lo = singular_points(b)
    ch1, ch2 = chambers_from_curves(*interface_curves(b, arc_samples))
    return EmbeddedBubble(bubble=b, p0=p0, p1=p1, p2=p2,
                          t1=float(p1[0]), t2=float(p2[0]),
                          s_upper=s_up, s_lower=s_lo,
                          chamber1=ch1, chamber2=ch2)
