"""Command-line front end.

Exit status: 0 when every asserted inequality holds, 1 on a failed check
(a JSON failure record is written to stdout), 2 on invalid arguments.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import asymmetry, coercivity, geometry, lab, perturbation, report, spectral
from .errors import BubbleError, DomainError, PreconditionError

DEFAULT_R1 = 0.5


@dataclass
class RunConfig:
    subcommand: str
    r1: float | None = None
    m1: float | None = None
    m2: float | None = None
    equal_radius: float | None = None
    theta: float | None = None
    s: float = 1.0
    modes: int = 64
    grid: int | None = None
    samples: int = 1024
    eps: float = perturbation.DEFAULT_EPS
    seed: int = lab.DEFAULT_SEED
    n: int | None = None
    t_range: tuple[float, float] = (1e-3, 1e-1)
    out: Path | None = None
    fmt: str = "json"

    def bubble(self) -> geometry.StandardBubble:
        if self.equal_radius is not None:
            return geometry.equal_from_radius(self.equal_radius)
        if self.m1 is not None:
            return geometry.from_masses(self.m1, self.m2)
        return geometry.from_r1(DEFAULT_R1 if self.r1 is None else self.r1)


class CheckFailed(Exception):
    """An asserted inequality failed; carries the partial result."""

    def __init__(self, message: str, payload: dict | None = None):
        super().__init__(message)
        self.payload = payload or {}


# ------------------------------------------------------------------ commands

def _bubble_record(b: geometry.StandardBubble) -> dict:
    rec = asdict(b)
    rec["r0"] = None if b.equal_mass else b.r0
    rec["perimeter"] = b.perimeter
    rec["total_mass"] = b.total_mass
    return rec


def cmd_geometry(cfg: RunConfig):
    b = cfg.bubble()
    b.check()
    emb = geometry.embed(b)
    a1, a2 = emb.areas()
    rec = _bubble_record(b)
    rec["polygon_areas"] = [a1, a2]
    rec["polygon_area_rel_error"] = max(abs(a1 - b.m1) / b.m1, abs(a2 - b.m2) / b.m2)
    if rec["polygon_area_rel_error"] > 1e-5:
        raise CheckFailed("polygon areas disagree with the closed-form masses", rec)
    summary = f"geometry ok: m1={b.m1:.12g} m2={b.m2:.12g} P={b.perimeter:.12g}"
    return rec, None, summary


def cmd_poincare(cfg: RunConfig):
    theta = math.pi / 2 if cfg.theta is None else cfg.theta
    exact = spectral.constrained_infimum(theta, cfg.s)
    gal = spectral.galerkin_solve(theta, cfg.s, cfg.modes)
    rec = {"theta": theta, "s": cfg.s, "modes": cfg.modes, "g": spectral.g_value(theta),
           "M": spectral.fuglede_M(theta), "closed_form": exact.value, "value": gal.value,
           "difference": gal.value - exact.value,
           "restricted_min_eig": gal.restricted_min_eig}
    # a Galerkin value is a minimum over a subspace, so it cannot undercut the infimum
    if gal.value < exact.value - 1e-10 * max(1.0, abs(exact.value)):
        raise CheckFailed("Galerkin value below the closed-form infimum", rec)
    summary = f"poincare: closed form {exact.value:.10g}, galerkin(N={cfg.modes}) {gal.value:.10g}"
    return rec, None, summary


def cmd_coercivity(cfg: RunConfig):
    scan = coercivity.beta_star_scan(cfg.grid or 10_000)
    alpha = coercivity.alpha_coeffs()
    slope = coercivity.det_slope()
    rec = {"beta_star": scan.beta_star, "argmin": scan.argmin, "grid": cfg.grid or 10_000,
           "rows": int(scan.table.shape[0]), "lipschitz": scan.lipschitz,
           "det_slope_small_r": slope,
           "alpha": {"a1": alpha.c1, "a2": alpha.c2, "a3": alpha.c3, "det": alpha.det,
                     "eigen_min": alpha.eigen_min},
           "records": scan.records()}
    if not abs(slope - 1.0) <= 0.1:
        raise CheckFailed(f"small-r determinant slope {slope:.4f} is not 1 +- 0.1", rec)
    tables = {"csv": report.to_csv(coercivity.SCAN_COLUMNS, scan.table),
              "svg": report.beta_scan_svg(scan.table)}
    summary = (f"beta_star={scan.beta_star:.6g} at r1={scan.argmin:.6g}; "
               f"alpha det={alpha.det:.6g}; det slope={slope:.4f}")
    return rec, tables, summary


def cmd_perturb(cfg: RunConfig):
    b = cfg.bubble()
    pb = lab.feasible_sample(b, lab.sample_rng(cfg.seed, 0), cfg.eps)
    br = perturbation.deficit(pb)
    res = asymmetry.asymmetry(pb, grid=cfg.grid or 1024, samples=cfg.samples)
    audit = lab.dichotomy_audit(b, pb.profiles, strict=False)
    direction = lab.random_direction(lab.sample_rng(cfg.seed, 1), b)
    scan = lab.taylor_residual_scan(b, direction, np.geomspace(*cfg.t_range, 9))
    rec = {"bubble": _bubble_record(b), "sigma": pb.sigma,
           "coefficients": [p.coeffs for p in pb.profiles],
           "volumes": perturbation.volumes(pb),
           "volume_error": perturbation.volume_error(pb),
           "perimeter": br.exact_perimeter, "delta": br.deficit,
           "quadratic_model": br.quadratic_model, "residual": br.residual,
           "alpha": res.alpha, "alpha_error": res.error, "isometry": res.isometry.as_dict(),
           "audit": audit.as_dict(),
           "taylor": {"t": scan.t, "residuals": scan.residuals, "slope": scan.slope}}
    if br.deficit < -lab.DELTA_TOL or not audit.passed:
        raise CheckFailed("negative deficit or failed audit", rec)
    summary = f"perturb: sigma={pb.sigma:.4g} delta={br.deficit:.4g} alpha={res.alpha:.4g}"
    return rec, None, summary


_SAMPLE_COLUMNS = ("index", "sigma", "delta", "alpha", "alpha_error", "ratio",
                   "energy_ratio", "included", "branches", "status")


def cmd_sweep(cfg: RunConfig):
    b = cfg.bubble()
    rep = lab.stability_sweep(b, cfg.n or 100, cfg.eps, cfg.seed, grid=cfg.grid or 1024,
                              samples=cfg.samples, taylor_directions=3, strict=False)
    rec = rep.as_dict()
    rows = [[getattr(s, c) if c != "branches" else "/".join(s.branches)
             for c in _SAMPLE_COLUMNS] for s in rep.samples]
    tables = {"csv": report.to_csv(_SAMPLE_COLUMNS, rows)}
    if rep.violations or not rep.kappa_hat > 0 or not rep.kappa2_hat > 0:
        raise CheckFailed("stability sweep failed", rec)
    summary = (f"sweep: n={len(rep.samples)} kappa_hat={rep.kappa_hat:.6g} "
               f"kappa2_hat={rep.kappa2_hat:.6g} violations=0 excluded={rep.excluded}")
    return rec, tables, summary


def cmd_audit(cfg: RunConfig):
    b = cfg.bubble()
    n = cfg.n or 100
    records, branches = [], {}
    for i in range(n):
        pb = lab.feasible_sample(b, lab.sample_rng(cfg.seed, i), cfg.eps)
        a = lab.dichotomy_audit(b, pb.profiles, strict=False)
        key = "/".join(a.branches)
        branches[key] = branches.get(key, 0) + 1
        if not a.passed:
            records.append({"index": i, **a.as_dict()})
    rec = {"n": n, "eps": cfg.eps, "seed": cfg.seed, "branches": branches,
           "failures": records}
    if records:
        raise CheckFailed(f"{len(records)} audit failures", rec)
    return rec, None, f"audit: {n} samples, 0 failures, branches {branches}"


def cmd_interp(cfg: RunConfig):
    res = lab.interpolation_check(cfg.n or 1000, cfg.seed, strict=False)
    rec = res._asdict()
    if res.violations:
        raise CheckFailed(f"{res.violations} interpolation violations", rec)
    return rec, None, f"interp: {res.n} splines, 0 violations, worst ratio {res.worst_ratio:.4f}"


HELP = {"geometry": "standard bubble parameters and invariant checks",
        "poincare": "mean-constrained Poincare infimum, closed form and Galerkin",
        "coercivity": "scan of the quadratic-form coefficients over r1",
        "perturb": "one random volume-feasible perturbation: sigma, delta, alpha",
        "sweep": "randomised stability sweep of delta / alpha^2",
        "audit": "per-interface coercivity audit on random perturbations",
        "interp": "interpolation inequality on random cubic splines"}

COMMANDS = {"geometry": cmd_geometry, "poincare": cmd_poincare,
            "coercivity": cmd_coercivity, "perturb": cmd_perturb, "sweep": cmd_sweep,
            "audit": cmd_audit, "interp": cmd_interp}


# ------------------------------------------------------------------ parsing

def _positive(kind):
    def conv(text):
        v = kind(text)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v
    return conv


def _t_range(text):
    try:
        lo, hi = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected LO,HI") from None
    if not 0 < lo < hi:
        raise argparse.ArgumentTypeError("expected 0 < LO < HI")
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    geo = common.add_mutually_exclusive_group()
    geo.add_argument("--r1", type=float, help="small radius of the canonical bubble (r2 = 1)")
    geo.add_argument("--m1", type=_positive(float), help="area of the smaller chamber")
    geo.add_argument("--equal-radius", type=_positive(float), help="equal-mass bubble radius")
    common.add_argument("--m2", type=_positive(float), help="area of the larger chamber")
    common.add_argument("--theta", type=float)
    common.add_argument("--s", type=float, default=1.0)
    common.add_argument("--modes", type=_positive(int), default=64)
    common.add_argument("--grid", type=_positive(int))
    common.add_argument("--samples", type=_positive(int), default=1024)
    common.add_argument("--eps", type=_positive(float), default=perturbation.DEFAULT_EPS)
    common.add_argument("--seed", type=int, default=lab.DEFAULT_SEED)
    common.add_argument("--n", type=_positive(int))
    common.add_argument("--t-range", type=_t_range, default=(1e-3, 1e-1))
    common.add_argument("--out", type=Path)
    common.add_argument("--format", dest="fmt", choices=("csv", "json", "svg"), default=None)

    parser = argparse.ArgumentParser(prog="bubblestab",
                                     description="Stability checks for planar double bubbles.")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=HELP[name])
    return parser


def parse_config(argv=None) -> RunConfig:
    parser = build_parser()
    ns = parser.parse_args(argv)
    if (ns.m1 is None) != (ns.m2 is None):
        parser.error("--m1 and --m2 must be given together")
    if ns.m1 is not None and ns.m2 < ns.m1:
        parser.error("need m2 >= m1")
    if ns.r1 is not None and not 0 < ns.r1 < 1:
        parser.error("--r1 must lie in (0, 1)")
    if ns.theta is not None and not 0 < ns.theta < math.pi:
        parser.error("--theta must lie in (0, pi)")
    if ns.subcommand in ("coercivity",) and ns.grid is not None and ns.grid < 100:
        parser.error("--grid must be >= 100 for coercivity")
    if ns.subcommand in ("perturb", "sweep") and ns.grid is not None and ns.grid < 512:
        parser.error("--grid must be >= 512 for asymmetry estimates")
    if ns.subcommand in ("sweep", "interp") and ns.n is not None and ns.n < 100:
        parser.error("--n must be >= 100")
    if not (1e-4 <= ns.t_range[0] and ns.t_range[1] <= 1e-1):
        parser.error("--t-range must lie in [1e-4, 1e-1]")
    fmt = ns.fmt
    if fmt is None:
        fmt = "csv" if ns.out is not None and ns.out.suffix == ".csv" else "json"
    if fmt == "svg" and ns.subcommand != "coercivity":
        parser.error("svg output is only available for coercivity")
    if fmt == "csv" and ns.subcommand not in ("coercivity", "sweep"):
        parser.error("csv output is only available for coercivity and sweep")
    return RunConfig(subcommand=ns.subcommand, r1=ns.r1, m1=ns.m1, m2=ns.m2,
                     equal_radius=ns.equal_radius, theta=ns.theta, s=ns.s, modes=ns.modes,
                     grid=ns.grid, samples=ns.samples, eps=ns.eps, seed=ns.seed, n=ns.n,
                     t_range=ns.t_range, out=ns.out, fmt=fmt)


def _emit(cfg: RunConfig, rec: dict, tables: dict | None, summary: str) -> None:
    text = tables[cfg.fmt] if cfg.fmt in ("csv", "svg") else report.to_json(rec)
    if cfg.out is None:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
        return
    cfg.out.write_text(text)
    if cfg.subcommand == "coercivity" and cfg.fmt == "csv":
        cfg.out.with_suffix(".svg").write_text(tables["svg"])
    print(summary)


def dispatch(cfg: RunConfig) -> int:
    try:
        rec, tables, summary = COMMANDS[cfg.subcommand](cfg)
    except CheckFailed as exc:
        failure = {"status": "failure", "subcommand": cfg.subcommand, "error": "CheckFailed",
                   "message": str(exc), "result": exc.payload}
        sys.stdout.write(report.to_json(failure))
        return 1
    except (DomainError, PreconditionError) as exc:
        print(f"bubblestab {cfg.subcommand}: error: {exc}", file=sys.stderr)
        return 2
    except (BubbleError, AssertionError) as exc:
        failure = {"status": "failure", "subcommand": cfg.subcommand,
                   "error": type(exc).__name__, "message": str(exc)}
        sys.stdout.write(report.to_json(failure))
        return 1
    _emit(cfg, rec, tables, summary)
    return 0


def main(argv=None) -> int:
    return dispatch(parse_config(argv))


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
