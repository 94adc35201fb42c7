"""CSV, JSON and SVG emitters for scan tables and run reports."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, is_dataclass
from typing import Iterable, Sequence

import numpy as np

SVG_WIDTH = 800
SVG_HEIGHT = 600


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def to_csv(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    """Header plus rows; floats with 17 significant digits, '\\n' line endings."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt_float(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def jsonable(obj):
    """Plain JSON data: numpy scalars unwrapped, non-finite floats become null."""
    if is_dataclass(obj) and not isinstance(obj, type):
        obj = asdict(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def to_json(obj) -> str:
    """Deterministic JSON; loads() followed by to_json() reproduces the same text."""
    return json.dumps(jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


# ------------------------------------------------------------------- SVG

def _ticks(lo: float, hi: float, n: int = 5) -> np.ndarray:
    span = hi - lo
    if span <= 0:
        return np.array([lo])
    raw = span / n
    mag = 10.0 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    return np.arange(start, hi + 0.5 * step, step)


def _panel(x: np.ndarray, y: np.ndarray, box: tuple[float, float, float, float],
           title: str, xlabel: str) -> list[str]:
    left, top, width, height = box
    x0, x1 = float(x.min()), float(x.max())
    y0, y1 = float(min(y.min(), 0.0)), float(y.max())
    pad = 0.05 * (y1 - y0 or 1.0)
    y0, y1 = y0 - pad, y1 + pad

    def sx(v):
        return left + (v - x0) / (x1 - x0) * width

    def sy(v):
        return top + height - (v - y0) / (y1 - y0) * height

    out = [f'<rect x="{left}" y="{top}" width="{width}" height="{height}" '
           'fill="none" stroke="#444" stroke-width="1"/>',
           f'<text x="{left + width / 2:.1f}" y="{top - 12}" text-anchor="middle" '
           f'font-size="16">{title}</text>',
           f'<text x="{left + width / 2:.1f}" y="{top + height + 40}" '
           f'text-anchor="middle" font-size="13">{xlabel}</text>']
    for t in _ticks(x0, x1):
        out.append(f'<line x1="{sx(t):.2f}" y1="{top + height}" x2="{sx(t):.2f}" '
                   f'y2="{top + height + 5}" stroke="#444"/>')
        out.append(f'<text x="{sx(t):.2f}" y="{top + height + 20}" text-anchor="middle" '
                   f'font-size="11">{t:g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{left - 5}" y1="{sy(t):.2f}" x2="{left}" y2="{sy(t):.2f}" '
                   'stroke="#444"/>')
        out.append(f'<text x="{left - 8}" y="{sy(t) + 4:.2f}" text-anchor="end" '
                   f'font-size="11">{t:.3g}</text>')
    if y0 < 0.0 < y1:
        out.append(f'<line x1="{left}" y1="{sy(0.0):.2f}" x2="{left + width}" '
                   f'y2="{sy(0.0):.2f}" stroke="#aaa" stroke-dasharray="4 3"/>')
    step = max(1, x.size // 2000)
    pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x[::step], y[::step]))
    out.append(f'<polyline points="{pts}" fill="none" stroke="#1f5fa8" stroke-width="1.5"/>')
    return out


def beta_scan_svg(table: np.ndarray) -> str:
    """Two panels: b1(r) on the left, (b1 b2 - b3^2) / r on the right."""
    r = table[:, 0]
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}" '
             f'width="{SVG_WIDTH}" height="{SVG_HEIGHT}">',
             f'<rect width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>']
    parts += _panel(r, table[:, 1], (70, 60, 300, 460), "b1(r)", "r")
    parts += _panel(r, table[:, 5], (470, 60, 300, 460), "(b1 b2 - b3^2) / r", "r")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
