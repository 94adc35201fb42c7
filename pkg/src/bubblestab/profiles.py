"""Perturbation profiles on symmetric intervals and their arc/sector functionals.

A profile is a finite sine series

    u(x) = sum_j c_j sin(j pi (x + theta) / (2 theta)),   -theta < x < theta,

so it vanishes at both end points and its quadratic moments are exact:
the basis is orthogonal with ``int phi_j^2 = theta`` and
``int (phi_j')^2 = theta (j pi / 2 theta)^2``.

The same type serves the circular arcs (``half_width`` an angle) and the flat
interface of the equal-mass bubble (``half_width = sqrt(3)/2``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy import integrate, optimize

from .errors import DomainError, PreconditionError

QUAD_EPSABS = 1e-12
QUAD_LIMIT = 2**20 // 21  # subintervals of a 21-point Kronrod rule


@dataclass(frozen=True, eq=False)
class ArcProfile:
    half_width: float
    coeffs: np.ndarray

    def __post_init__(self):
        if not self.half_width > 0:
            raise DomainError(f"half_width must be positive, got {self.half_width!r}")
        c = np.array(self.coeffs, dtype=float).ravel()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zero(cls, half_width: float, modes: int = 1) -> "ArcProfile":
        return cls(half_width, np.zeros(modes))

    @classmethod
    def single(cls, half_width: float, mode: int, amplitude: float) -> "ArcProfile":
        c = np.zeros(mode)
        c[mode - 1] = amplitude
        return cls(half_width, c)

    @property
    def modes(self) -> int:
        return self.coeffs.size

    @property
    def wavenumbers(self) -> np.ndarray:
        j = np.arange(1, self.modes + 1)
        return j * math.pi / (2.0 * self.half_width)

    def _phase(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.multiply.outer(x + self.half_width, self.wavenumbers)

    def __call__(self, x):
        return np.sin(self._phase(x)) @ self.coeffs

    def deriv(self, x):
        return np.cos(self._phase(x)) @ (self.coeffs * self.wavenumbers)

    def deriv2(self, x):
        return -(np.sin(self._phase(x)) @ (self.coeffs * self.wavenumbers**2))

    def __add__(self, other: "ArcProfile") -> "ArcProfile":
        if other.half_width != self.half_width:
            raise DomainError("cannot add profiles on different intervals")
        n = max(self.modes, other.modes)
        c = np.zeros(n)
        c[: self.modes] += self.coeffs
        c[: other.modes] += other.coeffs
        return ArcProfile(self.half_width, c)

    def __mul__(self, t: float) -> "ArcProfile":
        return ArcProfile(self.half_width, t * self.coeffs)

    __rmul__ = __mul__

    def with_coeff(self, mode: int, value: float) -> "ArcProfile":
        c = np.zeros(max(self.modes, mode))
        c[: self.modes] = self.coeffs
        c[mode - 1] = value
        return ArcProfile(self.half_width, c)

    def reflected(self) -> "ArcProfile":
        """The profile x -> u(-x); mode j picks up the sign (-1)^(j+1)."""
        j = np.arange(1, self.modes + 1)
        return ArcProfile(self.half_width, self.coeffs * np.where(j % 2, 1.0, -1.0))

    def basis_means(self) -> np.ndarray:
        """Integrals of the basis functions: 4 theta / (j pi) for odd j, else 0."""
        j = np.arange(1, self.modes + 1)
        return np.where(j % 2 == 1, 4.0 * self.half_width / (j * math.pi), 0.0)


class Moments(NamedTuple):
    mean: float    # int u
    l2sq: float    # int u^2
    h1sq: float    # int (u')^2
    supbound: float  # sum |c_j| >= sup |u|


def moments(p: ArcProfile) -> Moments:
    c = p.coeffs
    return Moments(mean=float(p.basis_means() @ c),
                   l2sq=float(p.half_width * (c @ c)),
                   h1sq=float(p.half_width * ((c * p.wavenumbers) @ (c * p.wavenumbers))),
                   supbound=float(np.abs(c).sum()))


def integrate_profile(p: ArcProfile, f: Callable[[float], float],
                      epsabs: float = QUAD_EPSABS, points=None) -> float:
    """Adaptive Gauss-Kronrod quadrature of ``f`` over (-theta, theta)."""
    val, _ = integrate.quad(f, -p.half_width, p.half_width, epsabs=epsabs,
                            epsrel=0.0, limit=QUAD_LIMIT, points=points)
    return float(val)


def sector_area_delta(p: ArcProfile) -> float:
    """|S(theta, u)| - |S(theta)| for the unit sector, i.e. int u + u^2/2."""
    m = moments(p)
    return m.mean + 0.5 * m.l2sq


def _require_small(p: ArcProfile, bound: float, strict: bool) -> float:
    sup = moments(p).supbound
    if (sup >= bound) if strict else (sup > bound):
        raise PreconditionError(
            f"profile sup-norm bound {sup:.6g} must be {'<' if strict else '<='} {bound}")
    return sup


def arc_length_excess(p: ArcProfile, epsabs: float = QUAD_EPSABS) -> float:
    """Length of the perturbed unit arc minus ``2 theta``.

    The integrand sqrt((1+u)^2 + u'^2) - 1 is evaluated in a cancellation-free
    form so the result keeps full relative accuracy for small profiles.
    """
    _require_small(p, 1.0, strict=True)

    def excess(x):
        u = float(p(x))
        du = float(p.deriv(x))
        w = 2.0 * u + u * u + du * du
        return w / (math.sqrt(1.0 + w) + 1.0)

    return integrate_profile(p, excess, epsabs)


def arc_length(p: ArcProfile, epsabs: float = QUAD_EPSABS) -> float:
    """Length of the perturbed unit arc A(theta, u) by quadrature."""
    total = 2.0 * p.half_width + arc_length_excess(p, epsabs)
    sup = moments(p).supbound
    floor = 2.0 * p.half_width * (1.0 - sup)
    if total < floor - 1e-12:
        raise PreconditionError(f"arc length {total!r} below radial lower bound {floor!r}")
    return total


def arc_length_quadratic(p: ArcProfile) -> float:
    """Second-order model 2 theta + int u + int (u')^2 / 2."""
    m = moments(p)
    return 2.0 * p.half_width + m.mean + 0.5 * m.h1sq


def segment_length_excess(p: ArcProfile, epsabs: float = QUAD_EPSABS) -> float:
    """Length of the graph x -> (v(x), x) minus the segment length."""

    def excess(x):
        dv = float(p.deriv(x))
        w = dv * dv
        return w / (math.sqrt(1.0 + w) + 1.0)

    return integrate_profile(p, excess, epsabs)


def segment_length(p: ArcProfile, epsabs: float = QUAD_EPSABS) -> float:
    """Length of the unit flat interface displaced normally by ``v``."""
    return 2.0 * p.half_width + segment_length_excess(p, epsabs)


def segment_length_quadratic(p: ArcProfile) -> float:
    return 2.0 * p.half_width + 0.5 * moments(p).h1sq


def _sign_change_points(p: ArcProfile, f, n: int = 2049):
    """Interior zeros of ``f``, bracketed on a grid and refined with Brent's method."""
    x = np.linspace(-p.half_width, p.half_width, n)
    y = f(x)
    idx = np.nonzero(np.signbit(y[:-1]) != np.signbit(y[1:]))[0]
    pts = []
    for i in idx:
        a, b = float(x[i]), float(x[i + 1])
        if y[i] == 0.0:
            root = a
        elif y[i + 1] == 0.0:
            root = b
        else:
            root = optimize.brentq(lambda t: float(f(t)), a, b, xtol=1e-15)
        if -p.half_width < root < p.half_width:
            pts.append(root)
    return sorted(set(pts)) or None


def abs_integral(p: ArcProfile) -> float:
    """int |u| by quadrature, split at sign changes."""
    return integrate_profile(p, lambda x: abs(float(p(x))),
                             points=_sign_change_points(p, p))


def sector_symdiff(p: ArcProfile) -> float:
    """Exact |S(theta, u) Delta S(theta)| = int |u + u^2 / 2| (needs 1 + u > 0)."""
    def f(x):
        u = p(x)
        return u + 0.5 * u * u
    return integrate_profile(p, lambda x: abs(float(f(x))),
                             points=_sign_change_points(p, f))


def symdiff_sector_bound(p: ArcProfile) -> float:
    """Upper bound (3/2) int |u| for the sector symmetric difference (|u| <= 1)."""
    _require_small(p, 1.0, strict=False)
    return 1.5 * abs_integral(p)


def project(f: Callable[[np.ndarray], np.ndarray], half_width: float,
            modes: int, nodes: int = 512) -> ArcProfile:
    """L2 projection of ``f`` onto the first ``modes`` sine modes."""
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    x = half_width * xg
    w = half_width * wg
    basis = ArcProfile(half_width, np.zeros(modes))
    phi = np.sin(basis._phase(x))
    return ArcProfile(half_width, (w * f(x)) @ phi / half_width)
