import json
import math
import re
from dataclasses import dataclass

import numpy as np

from bubblestab import coercivity, report


def test_csv_format():
    text = report.to_csv(("a", "b", "c"), [[0.1, 1, "x"], [np.float64(1 / 3), np.int64(2), "y"]])
    assert text == "a,b,c\n0.10000000000000001,1,x\n0.33333333333333331,2,y\n"
    assert "\r" not in text


def test_csv_floats_round_trip():
    rng = np.random.default_rng(0)
    vals = rng.normal(size=50)
    text = report.to_csv(("v",), [[v] for v in vals])
    back = np.array([float(line) for line in text.splitlines()[1:]])
    assert np.array_equal(back, vals)


@dataclass
class _Rec:
    x: float
    arr: np.ndarray


def test_jsonable_handles_numpy_and_nonfinite():
    out = report.jsonable({"a": np.float32(0.5), "b": np.arange(3), "c": math.nan,
                           "d": (np.bool_(True), math.inf), 1: _Rec(1.0, np.zeros(2))})
    assert out == {"a": 0.5, "b": [0, 1, 2], "c": None, "d": [True, None],
                   "1": {"x": 1.0, "arr": [0.0, 0.0]}}


def test_json_round_trip_is_byte_identical():
    obj = {"z": [1e-300, 0.1, -2.5e17, 1 / 3], "a": {"n": 3, "s": "text", "none": None}}
    text = report.to_json(obj)
    assert report.to_json(json.loads(text)) == text
    assert text.endswith("\n") and list(json.loads(text)) == ["a", "z"]


def test_svg_has_fixed_viewbox_and_two_panels():
    scan = coercivity.beta_star_scan(200, refine=2)
    svg = report.beta_scan_svg(scan.table)
    assert svg.startswith('<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 800 600"')
    assert svg.count("<polyline") == 2 and svg.rstrip().endswith("</svg>")
    for m in re.finditer(r'points="([^"]+)"', svg):
        pts = np.array([[float(c) for c in p.split(",")] for p in m.group(1).split()])
        assert np.all(pts >= 0) and np.all(pts[:, 0] <= 800) and np.all(pts[:, 1] <= 600)


def test_ticks_cover_range():
    t = report._ticks(0.0, 1.0)
    assert t[0] >= 0.0 and t[-1] <= 1.0 + 1e-12 and 3 <= len(t) <= 11
