"""Normalised L1 distance between clusters and the Fraenkel asymmetry.

Areas of symmetric differences are measured by classifying the cell centres
of a uniform square lattice (see :mod:`bubblestab._kernels`).  The lattice
spacing is fixed by the reference bubble and the lattice is anchored at a
fixed point, so moving one cluster never shifts the cells; this keeps the
objective of the isometry search free of re-gridding jitter.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize
from shapely.geometry import LinearRing

from . import _kernels
from .errors import GeometryError, PreconditionError, SearchError
from .geometry import StandardBubble
from .perturbation import PerturbedBubble, unperturbed
from .profiles import abs_integral, moments

DEFAULT_GRID = 2048
DEFAULT_SAMPLES = 1024
LATTICE_PAD = 0.05


@dataclass(frozen=True)
class IsometryParams:
    """Planar isometry x -> R(phi) F x + (tx, ty), F the reflection y -> -y if ``reflect``."""

    tx: float = 0.0
    ty: float = 0.0
    phi: float = 0.0
    reflect: bool = False

    def apply(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        if self.reflect:
            pts = pts * np.array([1.0, -1.0])
        c, s = math.cos(self.phi), math.sin(self.phi)
        rot = np.array([[c, -s], [s, c]])
        return pts @ rot.T + np.array([self.tx, self.ty])

    def as_dict(self) -> dict:
        return {"tx": self.tx, "ty": self.ty, "phi": self.phi, "reflect": self.reflect}


IDENTITY = IsometryParams()


@dataclass(frozen=True, eq=False)
class Cluster:
    """Two chambers given as closed counter-clockwise polylines."""

    chamber1: np.ndarray
    chamber2: np.ndarray

    def transformed(self, iso: IsometryParams) -> "Cluster":
        return Cluster(iso.apply(self.chamber1), iso.apply(self.chamber2))

    def bounds(self) -> tuple[float, float, float, float]:
        pts = np.vstack([self.chamber1, self.chamber2])
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        return float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])

    def validate(self) -> "Cluster":
        for k, ch in enumerate((self.chamber1, self.chamber2), start=1):
            if not LinearRing(ch).is_simple:
                raise GeometryError(f"chamber {k} boundary self-intersects")
        return self


def cluster_of(pb: PerturbedBubble, samples: int = DEFAULT_SAMPLES) -> Cluster:
    return Cluster(*pb.chambers(samples)).validate()


def reference_cluster(base: StandardBubble, samples: int = DEFAULT_SAMPLES) -> Cluster:
    return Cluster(*unperturbed(base).chambers(samples))


@dataclass(frozen=True)
class Lattice:
    """Square lattice of spacing ``h`` anchored at ``anchor``."""

    h: float
    anchor: tuple[float, float]

    @classmethod
    def for_bubble(cls, base: StandardBubble, grid: int,
                   samples: int = DEFAULT_SAMPLES) -> "Lattice":
        x0, y0, x1, y1 = reference_cluster(base, samples).bounds()
        extent = max(x1 - x0, y1 - y0) * (1.0 + 2.0 * LATTICE_PAD)
        pad = LATTICE_PAD * extent
        return cls(h=extent / grid, anchor=(x0 - pad, y0 - pad))

    def window(self, bounds) -> tuple[float, float, int, int]:
        """Lattice-aligned origin and cell counts covering ``bounds``."""
        bx0, by0, bx1, by1 = bounds
        ax, ay = self.anchor
        h = self.h
        x0 = ax + math.floor((bx0 - ax) / h) * h
        y0 = ay + math.floor((by0 - ay) / h) * h
        nx = int(math.ceil((bx1 - x0) / h)) + 1
        ny = int(math.ceil((by1 - y0) / h)) + 1
        return x0, y0, nx, ny


def _joint_bounds(*clusters: Cluster):
    b = np.array([c.bounds() for c in clusters])
    return b[:, 0].min(), b[:, 1].min(), b[:, 2].max(), b[:, 3].max()


def symdiff_areas(e: Cluster, f: Cluster, lattice: Lattice) -> tuple[float, float]:
    """Lattice estimates of |E(1) Delta F(1)| and |E(2) Delta F(2)|."""
    x0, y0, nx, ny = lattice.window(_joint_bounds(e, f))
    out = []
    for a, b in ((e.chamber1, f.chamber1), (e.chamber2, f.chamber2)):
        xs, ys, starts = _kernels.pack_polygons([a, b])
        cells = _kernels.xor_cells(xs, ys, starts, x0, y0, lattice.h, nx, ny)
        out.append(cells * lattice.h ** 2)
    return out[0], out[1]


def _as_cluster(e, samples: int) -> Cluster:
    return cluster_of(e, samples) if isinstance(e, PerturbedBubble) else e


def symdiff_distance(e, base: StandardBubble, iso: IsometryParams = IDENTITY,
                     grid: int = DEFAULT_GRID, samples: int = DEFAULT_SAMPLES) -> float:
    """d(E, f(E0)) = |E(1) Delta f(E0(1))| / m1 + |E(2) Delta f(E0(2))| / m2."""
    if grid < 256:
        raise PreconditionError(f"grid must be >= 256, got {grid}")
    e = _as_cluster(e, samples)
    lattice = Lattice.for_bubble(base, grid, samples)
    a1, a2 = symdiff_areas(e, reference_cluster(base, samples).transformed(iso), lattice)
    return a1 / base.m1 + a2 / base.m2


class DistanceEstimate(NamedTuple):
    value: float
    coarse: float  # same quantity on the half-resolution lattice
    error: float   # |value - coarse|, first-order Richardson estimate


def distance_estimate(e, base: StandardBubble, iso: IsometryParams = IDENTITY,
                      grid: int = DEFAULT_GRID, samples: int = DEFAULT_SAMPLES
                      ) -> DistanceEstimate:
    e = _as_cluster(e, samples)
    fine = symdiff_distance(e, base, iso, grid, samples)
    coarse = symdiff_distance(e, base, iso, grid // 2, samples)
    return DistanceEstimate(fine, coarse, abs(fine - coarse))


@dataclass(frozen=True)
class AsymmetryResult:
    alpha: float
    isometry: IsometryParams
    grid: int
    error: float
    identity_value: float
    evaluations: int = field(default=0, compare=False)


def _centroid(poly: np.ndarray) -> np.ndarray:
    x, y = poly[:, 0], poly[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    a = 0.5 * cross.sum()
    return np.array([((x + xn) * cross).sum(), ((y + yn) * cross).sum()]) / (6.0 * a)


def centroid_alignment(e: Cluster, ref: Cluster) -> IsometryParams:
    """Proper isometry taking the chamber centroids of ``ref`` onto those of ``e``."""
    r1, r2 = _centroid(ref.chamber1), _centroid(ref.chamber2)
    c1, c2 = _centroid(e.chamber1), _centroid(e.chamber2)
    phi = math.atan2(*(c2 - c1)[::-1]) - math.atan2(*(r2 - r1)[::-1])
    phi = math.remainder(phi, 2.0 * math.pi)
    rotated = IsometryParams(0.0, 0.0, phi).apply(0.5 * (r1 + r2)[None, :])[0]
    t = 0.5 * (c1 + c2) - rotated
    return IsometryParams(float(t[0]), float(t[1]), phi)


def asymmetry(e, base: StandardBubble | None = None, grid: int = DEFAULT_GRID,
              samples: int = DEFAULT_SAMPLES, maxiter: int = 400) -> AsymmetryResult:
    """Minimise d(E, f(E0)) over planar isometries f.

    A standard bubble is symmetric under reflection in its axis, so every
    improper isometry image of it is also a proper one and the search runs
    over (tx, ty, phi) only.  Nelder-Mead starts from the identity and, when
    it differs, from the isometry aligning the chamber centroids.  The
    returned value never exceeds the identity value.
    """
    if isinstance(e, PerturbedBubble):
        base = e.base if base is None else base
    elif base is None:
        raise PreconditionError("a reference bubble is required for a bare cluster")
    e = _as_cluster(e, samples)
    ref = reference_cluster(base, samples)
    lattice = Lattice.for_bubble(base, grid, samples)
    x0, y0, x1, y1 = ref.bounds()
    diameter = math.hypot(x1 - x0, y1 - y0)
    evaluations = 0

    def objective(v):
        nonlocal evaluations
        evaluations += 1
        iso = IsometryParams(float(v[0]), float(v[1]), float(v[2]))
        a1, a2 = symdiff_areas(e, ref.transformed(iso), lattice)
        return a1 / base.m1 + a2 / base.m2

    best_val = objective(np.zeros(3))
    identity_value = best_val
    best_iso = IDENTITY
    starts = [np.zeros(3)]
    guess = centroid_alignment(e, ref)
    if math.hypot(guess.tx, guess.ty) > lattice.h or abs(guess.phi) > lattice.h / diameter:
        starts.append(np.array([guess.tx, guess.ty, guess.phi]))
    step = 0.02 * diameter
    offsets = np.array([[0, 0, 0], [step, 0, 0], [0, step, 0], [0, 0, 2 * step / diameter]])
    for start in starts:
        res = minimize(objective, start, method="Nelder-Mead",
                       options={"maxiter": maxiter, "initial_simplex": start + offsets,
                                "xatol": 0.25 * lattice.h, "fatol": 1e-9})
        if math.hypot(res.x[0], res.x[1]) > 2.0 * diameter + math.hypot(*start[:2]):
            raise SearchError(f"isometry search diverged to translation {res.x[:2]}")
        if res.fun < best_val:
            best_val = float(res.fun)
            best_iso = IsometryParams(float(res.x[0]), float(res.x[1]), float(res.x[2]))

    coarse = symdiff_distance(e, base, best_iso, grid // 2, samples)
    return AsymmetryResult(alpha=best_val, isometry=best_iso, grid=grid,
                           error=abs(best_val - coarse), identity_value=identity_value,
                           evaluations=evaluations)


class UpperChain(NamedTuple):
    lhs: float
    rhs: float
    grid_error: float
    dilation_term: float


def asymmetry_upper_chain(pb: PerturbedBubble, grid: int = DEFAULT_GRID,
                          samples: int = DEFAULT_SAMPLES) -> UpperChain:
    """Both sides of the triangle-inequality bound on |E(1) Delta E0(1)| / m1.

    rhs = (1+sigma)^2 sum_{k=0,1} r_k^2 (3/2) int |u_k| / m1
          + |(1+sigma) E0(1) Delta E0(1)| / m1
    """
    if any(moments(p).supbound > 1.0 for p in pb.profiles):
        raise PreconditionError("profiles must satisfy |u| <= 1")
    if not abs(pb.sigma) < 0.5:
        raise PreconditionError(f"|sigma| must be < 1/2, got {pb.sigma!r}")
    b = pb.base
    lattice = Lattice.for_bubble(b, grid, samples)
    coarse = Lattice.for_bubble(b, grid // 2, samples)
    ref = reference_cluster(b, samples)
    e = cluster_of(pb, samples)
    dilated = Cluster(*unperturbed(b, pb.sigma).chambers(samples))

    lhs = symdiff_areas(e, ref, lattice)[0] / b.m1
    lhs_coarse = symdiff_areas(e, ref, coarse)[0] / b.m1
    dil = symdiff_areas(dilated, ref, lattice)[0] / b.m1
    dil_coarse = symdiff_areas(dilated, ref, coarse)[0] / b.m1

    r0 = b.r1 if b.equal_mass else b.r0
    sector = r0 ** 2 * abs_integral(pb.profile0) + b.r1 ** 2 * abs_integral(pb.profile1)
    rhs = (1.0 + pb.sigma) ** 2 * 1.5 * sector / b.m1 + dil
    return UpperChain(lhs=lhs, rhs=rhs,
                      grid_error=abs(lhs - lhs_coarse) + abs(dil - dil_coarse),
                      dilation_term=dil)
