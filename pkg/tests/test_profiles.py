import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from bubblestab import profiles as pr
from bubblestab.errors import DomainError, PreconditionError
from bubblestab.profiles import ArcProfile, moments

half_widths = st.floats(0.2, 3.0)
coeff_lists = st.lists(st.floats(-1.0, 1.0, allow_subnormal=False), min_size=1, max_size=8)


def small_profile(theta, coeffs, size):
    c = np.asarray(coeffs, dtype=float)
    total = np.abs(c).sum()
    if total > 1e-9:
        c = c * (size / total)
    else:
        c = np.zeros_like(c)
    return ArcProfile(theta, c)


def polyline_arc(p, n=20001):
    phi = np.linspace(-p.half_width, p.half_width, n)
    r = 1.0 + p(phi)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi)])


@settings(max_examples=40, deadline=None)
@given(half_widths, coeff_lists)
def test_moments_match_quadrature(theta, coeffs):
    p = ArcProfile(theta, coeffs)
    m = moments(p)
    q = lambda f: integrate.quad(f, -theta, theta, limit=200, epsabs=1e-13)[0]
    assert m.mean == pytest.approx(q(lambda x: p(x)), abs=1e-9)
    assert m.l2sq == pytest.approx(q(lambda x: p(x) ** 2), abs=1e-9)
    assert m.h1sq == pytest.approx(q(lambda x: p.deriv(x) ** 2), rel=1e-8, abs=1e-9)
    x = np.linspace(-theta, theta, 1001)
    assert np.max(np.abs(p(x))) <= m.supbound + 1e-12


@settings(max_examples=30, deadline=None)
@given(st.floats(0.3, 2.8), coeff_lists, st.floats(0.0, 0.4))
def test_sector_area_matches_polygon(theta, coeffs, size):
    p = small_profile(theta, coeffs, size)
    pts = np.vstack([[0.0, 0.0], polyline_arc(p)])
    x, y = pts.T
    area = 0.5 * (x @ np.roll(y, -1) - y @ np.roll(x, -1))
    assert area - theta == pytest.approx(pr.sector_area_delta(p), abs=1e-6)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.3, 2.8), coeff_lists, st.floats(0.0, 0.4))
def test_arc_length_matches_polyline(theta, coeffs, size):
    p = small_profile(theta, coeffs, size)
    pts = polyline_arc(p, 40001)
    poly = np.hypot(*np.diff(pts, axis=0).T).sum()
    assert pr.arc_length(p) == pytest.approx(poly, rel=1e-7)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.3, 2.8), coeff_lists)
def test_arc_excess_is_second_order_accurate(theta, coeffs):
    base = small_profile(theta, coeffs, 1.0)
    # the expansion parameter is t * k^2 with k the largest wavenumber
    scale = 1.0 / (1.0 + base.wavenumbers[-1] ** 2)
    errs = []
    for t in (2e-2 * scale, 1e-2 * scale):
        p = t * base
        errs.append(abs(pr.arc_length(p) - pr.arc_length_quadratic(p)))
    # cubic remainder: halving t divides the error by about 8
    assert errs[1] <= errs[0] / 5 + 1e-13


def test_zero_profile_is_exact():
    p = ArcProfile.zero(1.0)
    assert pr.arc_length(p) == 2.0
    assert pr.sector_area_delta(p) == 0.0
    assert pr.segment_length(p) == 2.0


def test_segment_length_of_tilted_graph():
    # v(x) = a sin(pi (x + h) / h) has a closed form length via elliptic integrals;
    # compare with a dense polyline instead
    h = math.sqrt(3) / 2
    p = ArcProfile.single(h, 2, 0.1)
    y = np.linspace(-h, h, 200001)
    poly = np.hypot(np.diff(p(y)), np.diff(y)).sum()
    assert pr.segment_length(p) == pytest.approx(poly, rel=1e-9)


def test_arc_length_requires_small_profile():
    with pytest.raises(PreconditionError):
        pr.arc_length(ArcProfile.single(1.0, 1, 1.5))


def test_domain_checks():
    with pytest.raises(DomainError):
        ArcProfile(0.0, [1.0])
    with pytest.raises(DomainError):
        ArcProfile(1.0, [1.0]) + ArcProfile(2.0, [1.0])


def test_profiles_are_immutable():
    p = ArcProfile(1.0, [1.0, 2.0])
    with pytest.raises(ValueError):
        p.coeffs[0] = 3.0


@settings(max_examples=25, deadline=None)
@given(half_widths, coeff_lists)
def test_reflection(theta, coeffs):
    p = ArcProfile(theta, coeffs)
    x = np.linspace(-theta, theta, 101)
    assert np.allclose(p.reflected()(x), p(-x), atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.3, 2.8), coeff_lists, st.floats(0.0, 0.9))
def test_symdiff_bound(theta, coeffs, size):
    p = small_profile(theta, coeffs, size)
    exact = pr.sector_symdiff(p)
    assert exact <= pr.symdiff_sector_bound(p) + 1e-10


def test_sector_symdiff_of_uniform_scaling():
    # u = const is not a valid profile, but a single bump with known sign is:
    p = ArcProfile.single(1.0, 1, 0.2)
    m = moments(p)
    assert pr.sector_symdiff(p) == pytest.approx(m.mean + m.l2sq / 2, rel=1e-10)


def test_abs_integral_sign_change():
    p = ArcProfile.single(1.0, 2, 0.3)  # odd around 0
    # int |0.3 sin(pi (x+1))| over (-1, 1) = 0.3 * 4 / pi
    assert pr.abs_integral(p) == pytest.approx(1.2 / math.pi, abs=1e-11)


def test_project_recovers_sine_series():
    p = ArcProfile(0.8, [0.3, -0.1, 0.05])
    q = pr.project(p, 0.8, 6)
    assert np.allclose(q.coeffs[:3], p.coeffs, atol=1e-12)
    assert np.allclose(q.coeffs[3:], 0.0, atol=1e-12)


def test_linear_algebra_helpers():
    p = ArcProfile(1.0, [1.0])
    q = p.with_coeff(3, 2.0)
    assert q.modes == 3 and list(q.coeffs) == [1.0, 0.0, 2.0]
    assert list((2 * p + q).coeffs) == [3.0, 0.0, 2.0]
    assert p.basis_means()[0] == pytest.approx(4 / math.pi)
