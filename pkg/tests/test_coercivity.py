import math

import numpy as np
import pytest

from bubblestab import coercivity as co
from bubblestab import geometry
from bubblestab.errors import DomainError
from bubblestab.spectral import g_value


def test_half_radius_values():
    fc = co.beta_coeffs(0.5)
    assert fc.c1 == pytest.approx(0.880, abs=5e-3)
    assert fc.c2 == pytest.approx(0.192, abs=5e-3)
    assert fc.c3 == pytest.approx(-0.338, abs=5e-3)
    assert fc.det == pytest.approx(0.055, abs=5e-3)


def test_half_radius_by_hand():
    # r1 = 1/2: r0 = 1, theta = (pi/6, pi/2, 5pi/6), P = 5 pi / 2, g(pi/2) = 0
    m1 = 7 * math.pi / 24 - math.sqrt(3) / 4
    m2 = 2 * math.pi / 3 + math.sqrt(3) / 2
    mt2 = (m1 + m2) ** 2
    p = 5 * math.pi / 2
    g0 = g_value(math.pi / 6)
    b1 = g0 / 8 * m2 ** 2 / mt2 + 0.0 + p / 32 / mt2
    b2 = g0 * m1 ** 2 / mt2 + g_value(5 * math.pi / 6) + p / 4 / mt2
    b3 = -g0 * 0.5 ** 1.5 * m1 * m2 / mt2 + 0.5 ** 1.5 / 4 * p / mt2
    fc = co.beta_coeffs(0.5)
    assert (fc.c1, fc.c2, fc.c3) == pytest.approx((b1, b2, b3), rel=1e-13)


def test_alpha_values():
    fc = co.alpha_coeffs()
    assert fc.c1 == fc.c2
    assert fc.c1 == pytest.approx(0.471, abs=0.01)
    assert fc.c3 == pytest.approx(-0.206, abs=0.01)
    assert fc.det == pytest.approx(0.179, abs=0.01)
    assert fc.c1 > 0 and fc.det > 0


def test_eigen_min_matches_numpy():
    for r in np.linspace(0.02, 0.98, 17):
        fc = co.beta_coeffs(float(r))
        assert fc.eigen_min == pytest.approx(np.linalg.eigvalsh(fc.matrix())[0], abs=1e-14)
        assert (fc.eigen_min > 0) == (fc.c1 > 0 and fc.det > 0)


def test_scale_invariance():
    b = geometry.from_r1(0.3)
    for t in (0.1, 2.5, 40.0):
        s = co.beta_coeffs_for(b.scaled(t))
        r = co.beta_coeffs(0.3)
        assert (s.c1, s.c2, s.c3) == pytest.approx((r.c1, r.c2, r.c3), rel=1e-12)
    via_masses = co.beta_coeffs_for(geometry.from_masses(3 * b.m1, 3 * b.m2))
    assert via_masses.c1 == pytest.approx(co.beta_coeffs(0.3).c1, rel=1e-9)


def test_domain():
    for bad in (0.0, 1.0, 1.5):
        with pytest.raises(DomainError):
            co.beta_coeffs(bad)
    with pytest.raises(DomainError):
        co.beta_coeffs_for(geometry.equal_from_radius(1.0))
    with pytest.raises(DomainError):
        co.beta_star_scan(50)


def test_scan_positive_and_continuous():
    scan = co.beta_star_scan(1000)
    t = scan.table
    assert scan.beta_star > 0
    assert np.all(t[:, 1] > 0)
    assert np.all(np.diff(t[:, 0]) > 0)
    # no jumps beyond the recorded Lipschitz constant
    jumps = np.abs(np.diff(t[:, 1:4], axis=0))
    assert np.all(jumps <= scan.lipschitz * np.diff(t[:, 0])[:, None] * (1 + 1e-9))
    assert np.all(np.isfinite(scan.lipschitz))


def test_det_over_r_band():
    ratios = [co.beta_coeffs(r).det / r for r in np.linspace(0.01, 0.1, 50)]
    assert 0.1 < min(ratios) and max(ratios) < 0.25


def test_det_slope():
    assert co.det_slope() == pytest.approx(1.0, abs=0.1)


def test_form_lower_bound():
    fc = co.beta_coeffs(0.5)
    assert fc.quadratic(0.0, 0.0) == 0.0 and co.form_lower_bound(fc, 0.0, 0.0)
    w, v = np.linalg.eigh(fc.matrix())
    x, y = v[:, 0]
    assert fc.quadratic(x, y) == pytest.approx(fc.eigen_min * (x * x + y * y), abs=1e-12)
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(1000, 2)) * rng.lognormal(size=(1000, 1))
    assert all(co.form_lower_bound(fc, x, y) for x, y in pts)
