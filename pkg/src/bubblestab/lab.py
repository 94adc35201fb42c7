"""End-to-end experiments built on the lower-level modules.

* Taylor-residual scans of the second-order perimeter expansion.
* Randomised stability sweeps measuring delta / alpha^2 on volume-feasible
  perturbations.
* The two-branch coercivity audit for the individual interface profiles.
* Property tests of the Fuglede-type estimate and of the L^1 / C^{1,1}
  interpolation inequality.

Random streams are derived from ``(seed, index)`` so each sample can be
regenerated on its own and results do not depend on the worker count.
"""
from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from . import asymmetry as asym
from .errors import (GateError, GeometryError, PreconditionError, SearchError,
                     VerificationFailure)
from .geometry import StandardBubble
from .perturbation import (DEFAULT_EPS, DEFAULT_SIGMA_CAP, PerturbedBubble, deficit,
                           enforce_volumes, interface_half_width, volume_error)
from .profiles import ArcProfile, moments, sector_area_delta
from .spectral import constrained_infimum, dirichlet_eig_min, fuglede_check, fuglede_M

MAX_MODES = 8
GATE_HALVINGS = 20
NOISE_FACTOR = 5.0
DELTA_TOL = 1e-9
AUDIT_SLACK = 1e-9
DEFAULT_SEED = 20240601


def sample_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


def worker_count() -> int:
    """Worker processes for sweeps: CPU count, capped by ``BUBBLESTAB_THREADS``."""
    n = os.cpu_count() or 1
    cap = os.environ.get("BUBBLESTAB_THREADS")
    if cap:
        n = min(n, max(1, int(cap)))
    return n


# ---------------------------------------------------------------- profiles

def random_profile(rng: np.random.Generator, half_width: float,
                   max_modes: int = MAX_MODES, amplitude: float = 1.0) -> ArcProfile:
    """Sine profile with a random number of modes and c_j ~ U[-a/j^2, a/j^2]."""
    modes = int(rng.integers(1, max_modes + 1))
    j = np.arange(1, modes + 1)
    c = rng.uniform(-1.0, 1.0, modes) * amplitude / j**2
    return ArcProfile(half_width, c)


def random_direction(rng: np.random.Generator, base: StandardBubble,
                     max_modes: int = MAX_MODES) -> tuple[ArcProfile, ArcProfile, ArcProfile]:
    """Three random profiles, each normalised to sup bound 1."""
    widths = (interface_half_width(base), base.theta1, base.theta2)
    out = []
    for w in widths:
        p = random_profile(rng, w, max_modes)
        out.append(p * (1.0 / moments(p).supbound))
    return tuple(out)


def feasible_sample(base: StandardBubble, rng: np.random.Generator,
                    eps: float = DEFAULT_EPS, sigma_cap: float = DEFAULT_SIGMA_CAP
                    ) -> PerturbedBubble:
    """Random volume-feasible perturbation inside the (eps, sigma_cap) gate.

    Profiles are drawn with sup bound ``eps * U(0.05, 0.8)``; if the volume
    correction leaves the gate the scale is halved (at most 20 times).
    """
    direction = random_direction(rng, base)
    scale = eps * float(rng.uniform(0.05, 0.8))
    for _ in range(GATE_HALVINGS + 1):
        try:
            return enforce_volumes(base, *(scale * p for p in direction),
                                   eps=eps, sigma_cap=sigma_cap)
        except PreconditionError:
            scale *= 0.5
    raise GateError(f"no feasible scale after {GATE_HALVINGS} halvings")


# ------------------------------------------------------------ Taylor scans

class TaylorScan(NamedTuple):
    t: np.ndarray
    residuals: np.ndarray  # |exact - quadratic model| of (P - P0)/(1 + sigma)
    slope: float           # nan when every residual is zero


def _loglog_slope(t: np.ndarray, r: np.ndarray) -> float:
    keep = r > 0
    if keep.sum() < 2:
        return math.nan
    return float(np.polyfit(np.log(t[keep]), np.log(r[keep]), 1)[0])


def taylor_residual_scan(base: StandardBubble, direction: Sequence[ArcProfile],
                         t_grid: Sequence[float], eps: float = 0.5,
                         sigma_cap: float = 0.5) -> TaylorScan:
    """Residual of the second-order perimeter expansion along ``t * direction``.

    The gate here only guards the geometry (the stability gate is irrelevant
    to the expansion order).  Values of t at which the volume correction
    fails end the scan with a warning.
    """
    t_grid = np.asarray(sorted(t_grid), dtype=float)
    if t_grid.size and not (t_grid[0] >= 1e-4 and t_grid[-1] <= 1e-1):
        raise PreconditionError("t grid must lie in [1e-4, 1e-1]")
    ts, res = [], []
    for t in t_grid:
        try:
            pb = enforce_volumes(base, *(t * p for p in direction), eps=eps,
                                 sigma_cap=sigma_cap)
        except PreconditionError as exc:
            warnings.warn(f"taylor scan truncated at t={t:.3g}: {exc}", RuntimeWarning,
                          stacklevel=2)
            break
        ts.append(t)
        res.append(abs(deficit(pb).residual))
    ts_a, res_a = np.array(ts), np.array(res)
    return TaylorScan(ts_a, res_a, _loglog_slope(ts_a, res_a))


# ------------------------------------------------------------ audits

@dataclass
class InterfaceAudit:
    k: int
    theta: float
    branch: str          # "ho1", "ho2" or for k = 0 "ho3" / "ho4"
    lhs: float
    rhs: float
    dk_lhs: float
    dk_rhs: float
    ok: bool


@dataclass
class AuditRecord:
    interfaces: list[InterfaceAudit]
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def branches(self) -> tuple[str, ...]:
        return tuple(a.branch for a in self.interfaces)

    def as_dict(self) -> dict:
        return {"passed": self.passed, "failures": list(self.failures),
                "interfaces": [asdict(a) for a in self.interfaces]}


def _geq(lhs: float, rhs: float, slack: float = AUDIT_SLACK) -> bool:
    return lhs >= rhs - slack


def dichotomy_audit(base: StandardBubble, profiles: Sequence[ArcProfile],
                    strict: bool = True) -> AuditRecord:
    """Check the per-interface inequalities used to close the coercivity argument.

    k = 1, 2: if I_k^2 >= int u_k^2 / (2 M(theta_k)) the interface is in the
    large-mean branch; otherwise the Fuglede hypothesis must hold and the
    Fuglede estimate is verified.  k = 0: the Poincare-based lower bound for
    the interface (arc or flat segment).  For every k the mean-constrained
    lower bound int (u')^2 - u^2 >= g(theta) (I - int u^2 / 2)^2 is verified
    (for the flat interface: int (v')^2 >= int v^2 + g(sqrt3/2) (int v)^2).
    """
    p0, p1, p2 = profiles
    failures: list[str] = []
    audits: list[InterfaceAudit] = []

    m0 = moments(p0)
    theta0 = p0.half_width
    ci = constrained_infimum(theta0, m0.mean)
    if base.equal_mass:
        dk_lhs, dk_rhs = m0.h1sq, m0.l2sq + ci.value
        lhs, rhs, branch = m0.h1sq, 0.5 * m0.h1sq + m0.l2sq, "ho4"
    else:
        if dirichlet_eig_min(theta0) < 9.0 / 4.0:
            failures.append("k=0: Dirichlet eigenvalue below 9/4")
        dk_lhs, dk_rhs = m0.h1sq - m0.l2sq, ci.value
        lhs, rhs, branch = m0.h1sq - m0.l2sq, m0.h1sq / 3.0 + 0.5 * m0.l2sq, "ho3"
    ok = _geq(lhs, rhs) and _geq(dk_lhs, dk_rhs)
    if not _geq(lhs, rhs):
        failures.append(f"k=0 {branch}: {lhs!r} < {rhs!r}")
    if not _geq(dk_lhs, dk_rhs):
        failures.append(f"k=0 mean bound: {dk_lhs!r} < {dk_rhs!r}")
    audits.append(InterfaceAudit(0, theta0, branch, lhs, rhs, dk_lhs, dk_rhs, ok))

    for k, p in ((1, p1), (2, p2)):
        m = moments(p)
        theta = p.half_width
        i_k = sector_area_delta(p)
        dk_lhs = m.h1sq - m.l2sq
        dk_rhs = constrained_infimum(theta, i_k - 0.5 * m.l2sq).value
        big_mean = i_k * i_k >= m.l2sq / (2.0 * fuglede_M(theta))
        if big_mean:
            branch, lhs, rhs, ok = "ho2", i_k * i_k, m.l2sq / (2.0 * fuglede_M(theta)), True
        else:
            fc = fuglede_check(theta, p, strict=False)
            branch, lhs, rhs = "ho1", fc.lhs, fc.rhs
            ok = fc.holds_hypothesis and _geq(lhs, rhs)
            if not fc.holds_hypothesis:
                failures.append(f"k={k}: small I_k but Fuglede hypothesis fails")
            elif not ok:
                failures.append(f"k={k} ho1: {lhs!r} < {rhs!r}")
        if not _geq(dk_lhs, dk_rhs):
            ok = False
            failures.append(f"k={k} mean bound: {dk_lhs!r} < {dk_rhs!r}")
        audits.append(InterfaceAudit(k, theta, branch, lhs, rhs, dk_lhs, dk_rhs, ok))

    record = AuditRecord(audits, failures)
    if strict and failures:
        raise VerificationFailure("; ".join(failures))
    return record


# ------------------------------------------------------------ stability sweep

@dataclass
class SampleRecord:
    index: int
    sigma: float
    l2: tuple[float, float, float]
    h1: tuple[float, float, float]
    volume_error: float
    delta: float
    alpha: float
    alpha_error: float
    ratio: float         # delta / alpha^2 (nan when alpha is below the floor)
    energy_ratio: float  # 2 (P - P0) / (1 + sigma) over sigma^2 + sum r_k int (u')^2 + u^2
    included: bool
    branches: tuple[str, ...]
    audit_failures: list[str]
    status: str = "ok"


@dataclass
class StabilityReport:
    config: dict
    samples: list[SampleRecord]
    kappa_hat: float
    kappa2_hat: float
    violations: int
    optimizer_failures: int
    excluded: int
    residual_slopes: list[float]

    def as_dict(self) -> dict:
        return {"config": dict(self.config),
                "aggregates": {"kappa_hat": self.kappa_hat, "kappa2_hat": self.kappa2_hat,
                               "violations": self.violations,
                               "optimizer_failures": self.optimizer_failures,
                               "excluded": self.excluded,
                               "residual_slopes": list(self.residual_slopes)},
                "samples": [asdict(s) for s in self.samples]}


def _radius_weights(base: StandardBubble) -> tuple[float, float, float]:
    return (base.r1 if base.equal_mass else base.r0), base.r1, base.r2


def _evaluate_sample(args) -> SampleRecord:
    base, index, seed, eps, sigma_cap, grid, samples = args
    rng = sample_rng(seed, index)
    pb = feasible_sample(base, rng, eps, sigma_cap)
    ms = [moments(p) for p in pb.profiles]
    br = deficit(pb)
    excess = br.exact_perimeter - base.perimeter
    weights = _radius_weights(base)
    energy = pb.sigma ** 2 + sum(w * (m.h1sq + m.l2sq) for w, m in zip(weights, ms))
    energy_ratio = 2.0 * excess / (1.0 + pb.sigma) / energy if energy > 0 else math.nan
    audit = dichotomy_audit(base, pb.profiles, strict=False)

    status = "ok"
    alpha = alpha_err = math.nan
    try:
        res = asym.asymmetry(pb, grid=grid, samples=samples)
        alpha, alpha_err = res.alpha, res.error
    except (SearchError, GeometryError) as exc:
        status = f"optimizer_failure: {exc}"
    included = status == "ok" and alpha >= NOISE_FACTOR * alpha_err and alpha > 0
    return SampleRecord(
        index=index, sigma=pb.sigma,
        l2=tuple(m.l2sq for m in ms), h1=tuple(m.h1sq for m in ms),
        volume_error=volume_error(pb), delta=br.deficit, alpha=alpha, alpha_error=alpha_err,
        ratio=br.deficit / alpha ** 2 if included else math.nan,
        energy_ratio=energy_ratio, included=included, branches=audit.branches,
        audit_failures=list(audit.failures), status=status)


def stability_sweep(base: StandardBubble, n: int, eps: float = DEFAULT_EPS,
                    seed: int = DEFAULT_SEED, grid: int = 1024, samples: int = 1024,
                    sigma_cap: float = DEFAULT_SIGMA_CAP, taylor_directions: int = 0,
                    workers: int | None = None, strict: bool = True) -> StabilityReport:
    """delta and alpha over ``n`` random feasible perturbations of ``base``.

    kappa_hat is min delta / alpha^2 over samples whose alpha clears five
    times its Richardson error.  A sample with delta < -1e-9 or a failed
    audit counts as a violation; with ``strict`` any violation, or a
    non-positive kappa_hat, raises :class:`VerificationFailure` carrying the
    report.
    """
    if n < 100:
        raise PreconditionError(f"n must be >= 100, got {n}")
    jobs = [(base, i, seed, eps, sigma_cap, grid, samples) for i in range(n)]
    workers = worker_count() if workers is None else max(1, workers)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_evaluate_sample, jobs, chunksize=8))
    else:
        records = [_evaluate_sample(j) for j in jobs]

    violations = sum(1 for r in records if r.delta < -DELTA_TOL or r.audit_failures)
    failures = sum(1 for r in records if r.status != "ok")
    ratios = [r.ratio for r in records if r.included]
    energy = [r.energy_ratio for r in records if not math.isnan(r.energy_ratio)]

    slopes = []
    t_grid = np.geomspace(1e-3, 1e-1, 9)
    for i in range(taylor_directions):
        direction = random_direction(sample_rng(seed, n + i), base)
        slopes.append(taylor_residual_scan(base, direction, t_grid).slope)

    config = {"base": {"r1": base.r1, "equal_mass": base.equal_mass, "m1": base.m1,
                       "m2": base.m2},
              "n": n, "eps": eps, "sigma_cap": sigma_cap, "seed": seed, "grid": grid,
              "samples": samples, "noise_factor": NOISE_FACTOR}
    report = StabilityReport(config=config, samples=records,
                             kappa_hat=min(ratios) if ratios else math.nan,
                             kappa2_hat=min(energy) if energy else math.nan,
                             violations=violations, optimizer_failures=failures,
                             excluded=n - len(ratios), residual_slopes=slopes)
    if strict:
        problems = []
        if violations:
            problems.append(f"{violations} violations")
        if not report.kappa_hat > 0:
            problems.append(f"kappa_hat = {report.kappa_hat!r}")
        if not report.kappa2_hat > 0:
            problems.append(f"kappa2_hat = {report.kappa2_hat!r}")
        if problems:
            err = VerificationFailure("stability sweep failed: " + ", ".join(problems))
            err.report = report
            raise err
    return report


# ------------------------------------------------------------ Fuglede property test

def mean_suppressed_profile(rng: np.random.Generator, theta: float, modes: int = 16,
                            fill: float | None = None) -> ArcProfile:
    """Random profile with (int u)^2 = fill * int u^2 / M(theta), fill in [0, 1].

    The mean-free part has c_j ~ U[-1, 1] / j; the component along the mean
    functional is then chosen to reach the requested fill of the hypothesis.
    """
    j = np.arange(1, modes + 1)
    c = rng.uniform(-1.0, 1.0, modes) / j
    b = ArcProfile(theta, c).basis_means()
    bb = float(b @ b)
    c_perp = c - (b @ c) / bb * b
    inv_m = 1.0 / fuglede_M(theta)
    if fill is None:
        fill = float(rng.choice([1.0, rng.uniform(0.0, 1.0)]))
    # gamma^2 (bb - fill theta / M) = fill theta |c_perp|^2 / M
    denom = bb - fill * theta * inv_m
    gamma = math.sqrt(fill * theta * float(c_perp @ c_perp) * inv_m / denom)
    gamma *= 1.0 if rng.uniform() < 0.5 else -1.0
    return ArcProfile(theta, c_perp + gamma * b / math.sqrt(bb))


class FugledeSweep(NamedTuple):
    theta: float
    n: int
    violations: int
    min_margin: float  # min of (lhs - rhs) / int (u')^2


def fuglede_sweep(theta: float, n: int = 1000, seed: int = DEFAULT_SEED,
                  modes: int = 16) -> FugledeSweep:
    violations = 0
    margin = math.inf
    for i in range(n):
        p = mean_suppressed_profile(sample_rng(seed, i), theta, modes)
        fc = fuglede_check(theta, p, strict=False)
        if not fc.holds_hypothesis:
            # only the boundary case can miss by rounding; treat as untested
            continue
        h1 = moments(p).h1sq
        margin = min(margin, (fc.lhs - fc.rhs) / h1)
        if fc.lhs < fc.rhs - 1e-12 * max(abs(fc.lhs), abs(fc.rhs)):
            violations += 1
    return FugledeSweep(theta, n, violations, margin)


# ------------------------------------------------------------ interpolation inequality

class InterpolationSides(NamedTuple):
    lhs: float   # sup |u'|
    rhs: float   # 2 |u|_1^{1/3} sup|u''|^{2/3} + 4 |u|_1 / s^2
    l1: float
    sup_d2: float


def interpolation_sides(u, du, d2u, s: float, points: int = 4096) -> InterpolationSides:
    """Both sides of the interpolation inequality from dense samples on [0, s]."""
    x = np.linspace(0.0, s, points)
    l1 = float(np.trapezoid(np.abs(u(x)), x))
    lhs = float(np.max(np.abs(du(x))))
    sup_d2 = float(np.max(np.abs(d2u(x))))
    rhs = 2.0 * l1 ** (1.0 / 3.0) * sup_d2 ** (2.0 / 3.0) + 4.0 / s ** 2 * l1
    return InterpolationSides(lhs, rhs, l1, sup_d2)


def spline_sides(spline: CubicSpline, s: float, points: int = 4096) -> InterpolationSides:
    """Sides for a cubic spline on [0, s].

    The 4096-point sampling grid is augmented by the knots and by the zeros
    of u and u'', so the maxima of |u'| and |u''| are attained on the sample
    set; the L^1 norm is integrated exactly piece by piece between zeros.
    """
    d1 = spline.derivative(1)
    d2 = spline.derivative(2)
    zeros_u = spline.roots(extrapolate=False)
    zeros_d2 = d2.roots(extrapolate=False)
    x = np.unique(np.concatenate([np.linspace(0.0, s, points), spline.x, zeros_u, zeros_d2]))
    x = x[(x >= 0.0) & (x <= s)]
    cuts = np.unique(np.concatenate([[0.0, s], zeros_u[(zeros_u > 0) & (zeros_u < s)]]))
    l1 = float(sum(abs(spline.integrate(a, b)) for a, b in zip(cuts[:-1], cuts[1:])))
    lhs = float(np.max(np.abs(d1(x))))
    sup_d2 = float(np.max(np.abs(d2(x))))
    rhs = 2.0 * l1 ** (1.0 / 3.0) * sup_d2 ** (2.0 / 3.0) + 4.0 / s ** 2 * l1
    return InterpolationSides(lhs, rhs, l1, sup_d2)


def random_spline(rng: np.random.Generator) -> tuple[CubicSpline, float]:
    """Random cubic spline on [0, s], s ~ U[0.5, 2], 4 to 12 knots."""
    s = float(rng.uniform(0.5, 2.0))
    knots = int(rng.integers(4, 13))
    x = np.sort(np.concatenate([[0.0, s], rng.uniform(0.0, s, knots - 2)]))
    x = np.unique(x)
    y = rng.normal(size=x.size) + float(rng.normal()) * x
    return CubicSpline(x, y), s


class InterpolationResult(NamedTuple):
    n: int
    violations: int
    worst_ratio: float  # max lhs / rhs


def interpolation_check(n: int = 1000, seed: int = DEFAULT_SEED, points: int = 4096,
                        strict: bool = True) -> InterpolationResult:
    if n < 100:
        raise PreconditionError(f"n must be >= 100, got {n}")
    violations = 0
    worst = 0.0
    for i in range(n):
        spline, s = random_spline(sample_rng(seed, i))
        sides = spline_sides(spline, s, points)
        if sides.rhs > 0:
            worst = max(worst, sides.lhs / sides.rhs)
        if sides.lhs > sides.rhs * (1.0 + 1e-12):
            violations += 1
    result = InterpolationResult(n, violations, worst)
    if strict and violations:
        raise VerificationFailure(f"interpolation inequality violated {violations} times")
    return result

