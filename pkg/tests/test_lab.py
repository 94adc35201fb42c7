import math
import warnings

import numpy as np
import pytest

from bubblestab import geometry, lab
from bubblestab import perturbation as pt
from bubblestab.errors import PreconditionError, VerificationFailure
from bubblestab.profiles import ArcProfile, moments, project
from bubblestab.spectral import constrained_infimum, fuglede_M

T_GRID = np.geomspace(1e-3, 1e-1, 9)


def zeros(base):
    return (ArcProfile.zero(pt.interface_half_width(base)), ArcProfile.zero(base.theta1),
            ArcProfile.zero(base.theta2))


def test_taylor_zero_direction(half):
    scan = lab.taylor_residual_scan(half, zeros(half), T_GRID)
    assert np.all(scan.residuals == 0.0) and math.isnan(scan.slope)


def test_taylor_single_mode(half):
    z0, _, z2 = zeros(half)
    d = (z0, ArcProfile.single(half.theta1, 1, 1.0), z2)
    assert lab.taylor_residual_scan(half, d, T_GRID).slope >= 2.5


def test_taylor_flat_interface(equal):
    _, z1, z2 = zeros(equal)
    d = (ArcProfile.single(geometry.SEGMENT_HALF, 2, 1.0), z1, z2)
    assert lab.taylor_residual_scan(equal, d, T_GRID).slope >= 2.5


def test_taylor_truncates_with_warning(half):
    z0, _, z2 = zeros(half)
    d = (z0, ArcProfile.single(half.theta1, 1, 1.0), z2)
    with pytest.warns(RuntimeWarning, match="truncated"):
        scan = lab.taylor_residual_scan(half, d, T_GRID, eps=0.01)
    assert 0 < len(scan.t) < len(T_GRID)


def test_taylor_grid_range(half):
    with pytest.raises(PreconditionError):
        lab.taylor_residual_scan(half, zeros(half), [1e-5, 1e-2])


def test_audit_zero_profiles(any_base):
    rec = lab.dichotomy_audit(any_base, zeros(any_base))
    assert rec.passed
    for a in rec.interfaces:
        assert a.lhs == a.rhs == 0.0 and a.dk_lhs == 0.0


def test_audit_mean_free_profile_takes_fuglede_branch(half):
    z0, _, z2 = zeros(half)
    u1 = ArcProfile.single(half.theta1, 2, 0.02)  # theta1 = pi/2, mean zero
    rec = lab.dichotomy_audit(half, (z0, u1, z2))
    assert rec.branches[1] == "ho1" and rec.passed


def test_audit_minimizer_takes_large_mean_branch(half):
    ci = constrained_infimum(half.theta2, 1.0)
    u2 = project(ci.minimizer, half.theta2, 32)
    u2 = u2 * (0.03 / moments(u2).supbound)
    z0, z1, _ = zeros(half)
    rec = lab.dichotomy_audit(half, (z0, z1, u2))
    assert rec.branches[2] == "ho2" and rec.passed


def test_audit_flat_interface(equal):
    _, z1, z2 = zeros(equal)
    v = ArcProfile(geometry.SEGMENT_HALF, [0.02, -0.01, 0.005])
    rec = lab.dichotomy_audit(equal, (v, z1, z2))
    assert rec.branches[0] == "ho4" and rec.passed
    m = moments(v)
    assert m.h1sq >= 2 * m.l2sq


def test_audit_random_samples(any_base):
    for i in range(50):
        pb = lab.feasible_sample(any_base, lab.sample_rng(9, i))
        assert lab.dichotomy_audit(any_base, pb.profiles).passed


def test_feasible_sample_is_in_gate(any_base):
    for i in range(20):
        pb = lab.feasible_sample(any_base, lab.sample_rng(1, i))
        pb.gate()
        assert pt.volume_error(pb) < 1e-12
        assert all(p.modes <= lab.MAX_MODES for p in pb.profiles[1:])


def test_sample_streams_are_independent_of_order():
    a = lab.sample_rng(5, 3).uniform(size=4)
    lab.sample_rng(5, 2).uniform(size=100)
    assert np.array_equal(a, lab.sample_rng(5, 3).uniform(size=4))


def test_sweep_is_deterministic(half):
    a = lab.stability_sweep(half, 100, seed=77, grid=512)
    b = lab.stability_sweep(half, 100, seed=77, grid=512)
    assert a.as_dict() == b.as_dict() or _nan_equal(a.as_dict(), b.as_dict())
    assert a.violations == 0 and a.kappa_hat > 0 and a.kappa2_hat > 0


def _nan_equal(x, y):
    from bubblestab.report import to_json
    return to_json(x) == to_json(y)


def test_sweep_minimum_size(half):
    with pytest.raises(PreconditionError):
        lab.stability_sweep(half, 10)


def test_sweep_reports_violations(half, monkeypatch):
    real = lab._evaluate_sample

    def broken(args):
        rec = real(args)
        rec.delta = -1.0
        return rec

    monkeypatch.setattr(lab, "_evaluate_sample", broken)
    with pytest.raises(VerificationFailure) as info:
        lab.stability_sweep(half, 100, grid=512, workers=1)
    assert info.value.report.violations == 100


def test_worker_count(monkeypatch):
    monkeypatch.setenv("BUBBLESTAB_THREADS", "1")
    assert lab.worker_count() == 1


@pytest.mark.parametrize("theta", [math.pi / 3, 2 * math.pi / 3, 5 * math.pi / 6])
def test_mean_suppressed_profiles_meet_hypothesis(theta):
    rng = lab.sample_rng(0, 0)
    for fill in (0.0, 0.5, 1.0):
        p = lab.mean_suppressed_profile(rng, theta, fill=fill)
        m = moments(p)
        assert m.mean ** 2 == pytest.approx(fill * m.l2sq / fuglede_M(theta), rel=1e-9,
                                            abs=1e-15)


def test_fuglede_sweep_small():
    assert lab.fuglede_sweep(2.0, 200).violations == 0


def test_interpolation_anchors():
    s = lab.interpolation_sides(lambda x: x, lambda x: np.ones_like(x), lambda x: 0 * x, 1.0)
    assert (s.lhs, s.rhs) == pytest.approx((1.0, 2.0), abs=1e-12)
    s = lab.interpolation_sides(lambda x: np.sin(np.pi * x), lambda x: np.pi * np.cos(np.pi * x),
                                lambda x: -np.pi ** 2 * np.sin(np.pi * x), 1.0)
    assert s.lhs == pytest.approx(math.pi, abs=1e-9)
    assert s.rhs == pytest.approx(2 * 2 ** (1 / 3) * math.pi + 8 / math.pi, rel=1e-6)
    assert s.rhs == pytest.approx(10.46, abs=5e-3)
    s = lab.interpolation_sides(lambda x: 0 * x, lambda x: 0 * x, lambda x: 0 * x, 1.5)
    assert s.lhs == s.rhs == 0.0


def test_spline_sides_are_exact_for_linear():
    from scipy.interpolate import CubicSpline
    x = np.linspace(0.0, 2.0, 5)
    sides = lab.spline_sides(CubicSpline(x, 3.0 * x - 1.0), 2.0)
    # |u|_1 = int_0^2 |3x - 1| = 1/6 + 25/6
    assert sides.l1 == pytest.approx(26 / 6, rel=1e-12)
    assert sides.lhs == pytest.approx(3.0) and sides.sup_d2 == pytest.approx(0.0, abs=1e-12)


def test_interpolation_check_small():
    res = lab.interpolation_check(100, seed=1)
    assert res.violations == 0 and 0 < res.worst_ratio < 1
