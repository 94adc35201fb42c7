"""Compare the numba and numpy scanline kernels on symmetric-difference workloads.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``.  Both kernels
are called on the same packed polygons and must return identical counts.
"""
from __future__ import annotations

import argparse
import statistics
import time

from bubblestab import _kernels, geometry, lab
from bubblestab.asymmetry import Lattice, cluster_of, reference_cluster


def _workload(base, grid, samples, seed=7):
    pb = lab.feasible_sample(base, lab.sample_rng(seed, 0))
    e = cluster_of(pb, samples)
    ref = reference_cluster(base, samples)
    lattice = Lattice.for_bubble(base, grid, samples)
    x0, y0, nx, ny = lattice.window((min(e.bounds()[0], ref.bounds()[0]),
                                     min(e.bounds()[1], ref.bounds()[1]),
                                     max(e.bounds()[2], ref.bounds()[2]),
                                     max(e.bounds()[3], ref.bounds()[3])))
    xs, ys, starts = _kernels.pack_polygons([e.chamber1, ref.chamber1])
    return (xs, ys, starts, x0, y0, lattice.h, nx, ny)


def _time(fn, args, repeat):
    fn(*args)  # warm-up (includes JIT compilation for numba)
    out = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        out.append(time.perf_counter() - t)
    return statistics.median(out)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args(argv)
    if not _kernels.HAS_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")

    print(f"{'bubble':>10} {'grid':>6} {'samples':>8} {'numpy ms':>10} {'numba ms':>10} "
          f"{'speedup':>8}")
    for label, base in (("r1=0.5", geometry.from_r1(0.5)),
                        ("equal", geometry.equal_from_radius(1.0))):
        for grid, samples in ((512, 512), (1024, 1024), (2048, 1024), (4096, 4096)):
            w = _workload(base, grid, samples)
            a = _kernels.xor_cells_numpy(*w)
            b = _kernels.xor_cells_numba(*w)
            if a != b:
                raise SystemExit(f"kernel mismatch at grid {grid}: numpy {a}, numba {b}")
            t_np = _time(_kernels.xor_cells_numpy, w, args.repeat)
            t_nb = _time(_kernels.xor_cells_numba, w, args.repeat)
            print(f"{label:>10} {grid:>6} {samples:>8} {1e3 * t_np:>10.3f} "
                  f"{1e3 * t_nb:>10.3f} {t_np / t_nb:>8.1f}")


if __name__ == "__main__":
    main()
