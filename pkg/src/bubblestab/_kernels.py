"""Scanline rasterisation kernels.

The symmetric difference of several even-odd regions is the even-odd region
of the union of their boundaries, so one pass over all edges classifies every
cell centre of a uniform lattice against ``A xor B`` at once: per row, the
sorted crossing abscissae pair up into inside intervals and the cell centres
in each interval are counted arithmetically.  Cost is O(edges + crossings),
independent of the number of cells.

Two implementations with identical results are provided.  The numba one is
used unless numba is missing or ``BUBBLESTAB_JIT=0`` is set in the
environment.
"""
from __future__ import annotations

import math
import os

import numpy as np

try:
    from numba import njit
    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

USE_JIT = HAS_NUMBA and os.environ.get("BUBBLESTAB_JIT", "1").strip().lower() not in (
    "0", "false", "no", "off")
BACKEND = "numba" if USE_JIT else "numpy"


def pack_polygons(polys) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Concatenate closed polylines into (xs, ys, starts) arrays."""
    polys = [np.asarray(p, dtype=np.float64) for p in polys]
    starts = np.zeros(len(polys) + 1, dtype=np.int64)
    starts[1:] = np.cumsum([len(p) for p in polys])
    if polys:
        pts = np.vstack(polys)
    else:
        pts = np.zeros((0, 2))
    return np.ascontiguousarray(pts[:, 0]), np.ascontiguousarray(pts[:, 1]), starts


def xor_cells_numpy(xs, ys, starts, x0, y0, h, nx, ny) -> int:
    """Number of lattice cells whose centre lies in the XOR of the polygons."""
    xa_parts, ya_parts, xb_parts, yb_parts = [], [], [], []
    for k in range(len(starts) - 1):
        s, e = starts[k], starts[k + 1]
        if e - s < 3:
            continue
        px, py = xs[s:e], ys[s:e]
        xa_parts.append(px)
        ya_parts.append(py)
        xb_parts.append(np.roll(px, -1))
        yb_parts.append(np.roll(py, -1))
    if not xa_parts:
        return 0
    xa = np.concatenate(xa_parts)
    ya = np.concatenate(ya_parts)
    xb = np.concatenate(xb_parts)
    yb = np.concatenate(yb_parts)

    keep = ya != yb
    xa, ya, xb, yb = xa[keep], ya[keep], xb[keep], yb[keep]
    lo = np.minimum(ya, yb)
    hi = np.maximum(ya, yb)
    j0 = np.clip(np.ceil((lo - y0) / h - 0.5), 0, ny).astype(np.int64)
    j1 = np.clip(np.ceil((hi - y0) / h - 0.5), 0, ny).astype(np.int64)
    nrows = j1 - j0
    total = int(nrows.sum())
    if total == 0:
        return 0
    edge = np.repeat(np.arange(nrows.size), nrows)
    first = np.cumsum(nrows) - nrows
    row = j0[edge] + (np.arange(total) - first[edge])
    yc = y0 + (row + 0.5) * h
    t = (yc - ya[edge]) / (yb[edge] - ya[edge])
    x = xa[edge] + t * (xb[edge] - xa[edge])

    order = np.lexsort((x, row))
    x = x[order]
    a, b = x[0::2], x[1::2]
    ca = np.clip(np.ceil((a - x0) / h - 0.5), 0, nx)
    cb = np.clip(np.ceil((b - x0) / h - 0.5), 0, nx)
    return int((cb - ca).sum())


def _xor_cells_py(xs, ys, starts, x0, y0, h, nx, ny):
    counts = np.zeros(ny + 1, dtype=np.int64)
    npoly = starts.shape[0] - 1
    for k in range(npoly):
        s = starts[k]
        e = starts[k + 1]
        if e - s < 3:
            continue
        for i in range(s, e):
            q = i + 1 if i + 1 < e else s
            ya = ys[i]
            yb = ys[q]
            if ya == yb:
                continue
            lo = min(ya, yb)
            hi = max(ya, yb)
            j0 = min(max(math.ceil((lo - y0) / h - 0.5), 0), ny)
            j1 = min(max(math.ceil((hi - y0) / h - 0.5), 0), ny)
            for j in range(j0, j1):
                counts[j + 1] += 1
    for j in range(ny):
        counts[j + 1] += counts[j]
    total = counts[ny]
    if total == 0:
        return 0
    fill = counts[:ny].copy()
    xcross = np.empty(total, dtype=np.float64)
    for k in range(npoly):
        s = starts[k]
        e = starts[k + 1]
        if e - s < 3:
            continue
        for i in range(s, e):
            q = i + 1 if i + 1 < e else s
            ya = ys[i]
            yb = ys[q]
            if ya == yb:
                continue
            lo = min(ya, yb)
            hi = max(ya, yb)
            j0 = min(max(math.ceil((lo - y0) / h - 0.5), 0), ny)
            j1 = min(max(math.ceil((hi - y0) / h - 0.5), 0), ny)
            xa = xs[i]
            dx = xs[q] - xa
            dy = yb - ya
            for j in range(j0, j1):
                yc = y0 + (j + 0.5) * h
                xcross[fill[j]] = xa + (yc - ya) / dy * dx
                fill[j] += 1
    cells = 0
    for j in range(ny):
        a = counts[j]
        b = counts[j + 1]
        if b - a == 0:
            continue
        # rows hold a handful of crossings: insertion sort in place
        for m in range(a + 1, b):
            v = xcross[m]
            q = m - 1
            while q >= a and xcross[q] > v:
                xcross[q + 1] = xcross[q]
                q -= 1
            xcross[q + 1] = v
        for m in range(a, b - 1, 2):
            ca = min(max(math.ceil((xcross[m] - x0) / h - 0.5), 0), nx)
            cb = min(max(math.ceil((xcross[m + 1] - x0) / h - 0.5), 0), nx)
            cells += cb - ca
    return cells


if HAS_NUMBA:
    _xor_cells_jit = njit(cache=True, nogil=True)(_xor_cells_py)

    def xor_cells_numba(xs, ys, starts, x0, y0, h, nx, ny) -> int:
        return int(_xor_cells_jit(xs, ys, starts, float(x0), float(y0), float(h),
                                  int(nx), int(ny)))
else:  # pragma: no cover
    xor_cells_numba = None


def xor_cells(xs, ys, starts, x0, y0, h, nx, ny) -> int:
    if USE_JIT:
        return xor_cells_numba(xs, ys, starts, x0, y0, h, nx, ny)
    return xor_cells_numpy(xs, ys, starts, x0, y0, h, nx, ny)
