import math

import numpy as np
import pytest

from cmcstrip import boundary as bg


def fn_of(expr, lo, hi, modulus=None):
    return bg.BoundaryFunction.from_callable(expr, lo, hi, modulus=modulus)


FLAT = fn_of(lambda x: np.zeros_like(np.asarray(x, float)), -4, 4, modulus=1.0)
PARAB = fn_of(lambda x: np.asarray(x, float) ** 2, -3, 3, modulus=6.0)
CAP = fn_of(lambda x: -np.asarray(x, float) ** 2, -3, 3, modulus=6.0)


class TestBoundaryFunction:
    def test_window_check(self):
        with pytest.raises(ValueError):
            FLAT(5.0)

    def test_samples_and_interpolation(self):
        xs = np.linspace(0, 1, 11)
        f = bg.BoundaryFunction.from_samples(xs, xs**2)
        assert f(0.5) == pytest.approx(0.25, abs=5e-3)

    def test_continuity_hint_violation(self):
        xs = np.linspace(0, 1, 11)
        ys = np.zeros(11)
        ys[5] = 1.0  # jump far beyond the declared modulus
        with pytest.raises(ValueError, match="continuity hint"):
            bg.BoundaryFunction.from_samples(xs, ys, modulus=1.0)

    def test_from_csv(self, tmp_path):
        path = tmp_path / "f.csv"
        path.write_text("x,f\n0.0,1.0\n1.0,2.0\n2.0,3.0\n")
        f = bg.BoundaryFunction.from_csv(path)
        assert f.window == (0.0, 2.0)
        assert f(1.5) == pytest.approx(2.5)


class TestLowerSupportHeight:
    def test_flat(self):
        sc = bg.lower_support_height(FLAT, 0.5, 1.0)
        assert sc.height == pytest.approx(-1.0, abs=1e-12)
        assert np.min(np.abs(sc.touches - 0.5)) < 1e-3

    def test_line_closed_form(self):
        # tangency to z = m x: height -R*sqrt(1+m^2), touch at -mR/sqrt(1+m^2)
        m, R = 2.0, 1.0
        f = fn_of(lambda x: m * np.asarray(x, float), -5, 5, modulus=m)
        sc = bg.lower_support_height(f, 0.0, R)
        assert sc.height == pytest.approx(-R * math.sqrt(1 + m * m), abs=5e-6)
        assert np.min(np.abs(sc.touches + m * R / math.sqrt(1 + m * m))) < 5e-3

    def test_parabola_vertex(self):
        sc = bg.lower_support_height(PARAB, 0.0, 0.4)
        assert sc.height == pytest.approx(-0.4, abs=1e-10)
        assert np.min(np.abs(sc.touches)) < 1e-3

    def test_window_guard(self):
        with pytest.raises(ValueError):
            bg.lower_support_height(PARAB, 2.9, 0.4)


class TestUnderCondition:
    def test_flat_holds_everywhere(self):
        rep = bg.check_uniform_under_condition(FLAT, 1.0)
        assert rep.holds
        assert len(rep.violations) == 0

    def test_concave_cap_flips_at_osculating_radius(self):
        # curvature radius at the cap vertex is 1/2
        assert bg.check_uniform_under_condition(CAP, 0.4).holds
        rep = bg.check_uniform_under_condition(CAP, 0.6)
        assert rep.verdict == "fails"
        assert np.min(np.abs(rep.violations)) < 0.35  # the missed band straddles 0

    def test_convex_data_holds_for_every_radius(self):
        # convexity is the large-radius limit of the condition: a disk below
        # a convex graph tangent at any point stays below the tangent line,
        # hence below the graph, for arbitrarily large radius
        for R, win in ((0.4, 3), (0.6, 3), (1.0, 6), (4.0, 14)):
            f = fn_of(lambda x: np.asarray(x, float) ** 2, -win, win,
                      modulus=2.0 * win)
            assert bg.check_uniform_under_condition(f, R).holds, R

    def test_monotone_inclusion(self):
        # holds at R implies holds at every smaller radius
        held = [R for R in (0.1, 0.2, 0.3, 0.4, 0.45, 0.5, 0.55, 0.6)
                if bg.check_uniform_under_condition(CAP, R).holds]
        assert held == sorted(held)
        assert max(held) < 0.55  # flip near 1/2
        assert all(R <= max(held) for R in held)

    def test_narrow_window_rejected(self):
        with pytest.raises(ValueError):
            bg.check_uniform_under_condition(FLAT, 5.0)

    def test_inconclusive_on_coarse_sweep(self):
        rep = bg.check_uniform_under_condition(FLAT, 1.0, samples=9, centers=5)
        assert rep.verdict == "inconclusive"


class TestUpperConditionPoints:
    def test_flat_all_qualify(self):
        pts = bg.find_upper_condition_points(FLAT, 1.0)
        xs = np.linspace(-3, 3, 61)
        assert all(np.min(np.abs(pts - x)) < 0.02 for x in xs)

    def test_concave_corner_qualifies(self):
        tent = fn_of(lambda x: -np.abs(np.asarray(x, float)), -3, 3, modulus=1.0)
        pts = bg.find_upper_condition_points(tent, 1.0)
        assert np.min(np.abs(pts)) < 1e-3

    def test_parabola_vertex_band_excluded(self):
        # above the parabola, a unit disk cannot reach into the vertex region
        pts = bg.find_upper_condition_points(PARAB, 1.0)
        assert np.min(np.abs(pts)) > 0.3

    def test_coverage_guarantee(self):
        # every closed subinterval of length 2R meets the returned set
        R = 1.0
        pts = bg.find_upper_condition_points(PARAB, R)
        for a in np.linspace(-2.0, 0.0, 41):
            assert np.any((pts >= a) & (pts <= a + 2 * R)), a


class TestPinchedSlope:
    def test_flat_zero(self):
        assert bg.pinched_slope(FLAT, 0.0, 0.5, 0.5) == pytest.approx(0.0, abs=1e-8)

    def test_line_slope(self):
        m = 2.0
        f = fn_of(lambda x: m * np.asarray(x, float), -5, 5, modulus=m)
        assert bg.pinched_slope(f, 0.5, 0.5, 0.5) == pytest.approx(m, abs=5e-3)

    def test_parabola_slope(self):
        assert bg.pinched_slope(PARAB, 1.0, 0.2, 0.2) == pytest.approx(2.0, abs=5e-3)

    def test_uncertified_rejected(self):
        # the cap vertex admits no under circle of radius 0.6
        with pytest.raises(bg.CertificationError):
            bg.pinched_slope(CAP, 0.0, 0.6, 0.6)


class TestRollePoint:
    def test_symmetric_cap(self):
        f = fn_of(lambda x: 1.0 - np.asarray(x, float) ** 2, -3, 3, modulus=6.0)
        assert bg.rolle_point(f, 0.4, 0.4, -0.5, 0.5) == pytest.approx(0.0, abs=1e-12)

    def test_sine(self):
        f = fn_of(np.sin, -1, 5, modulus=1.0)
        c = bg.rolle_point(f, 0.9, 0.9, 1.0, 2.5)
        assert c == pytest.approx(math.pi / 2, abs=1e-3)

    def test_plateau_returns_leftmost(self):
        def plateau(x):
            # flat top on [-1, 1] with C^1 parabolic flanks (curvature radius 1/2)
            x = np.asarray(x, float)
            return -np.maximum(np.abs(x) - 1.0, 0.0) ** 2
        f = fn_of(plateau, -4, 4, modulus=6.0)
        c = bg.rolle_point(f, 0.3, 0.3, -2.0, 2.0)
        assert c == pytest.approx(-1.0, abs=2e-3)  # left edge of the argmax plateau

    def test_sign_precondition_rejected(self):
        f = fn_of(lambda x: 1.0 - np.asarray(x, float) ** 2, -3, 3, modulus=6.0)
        with pytest.raises(bg.CertificationError):
            bg.rolle_point(f, 0.4, 0.4, 0.2, 0.8)  # slope(a) < 0 already

    def test_random_caps_postconditions(self):
        # smooth random bumps with curvature radius above the swept radius:
        # the returned point must carry the upper condition and slope ~ 0
        rng = np.random.default_rng(42)
        for _ in range(5):
            amp = rng.uniform(0.5, 1.0)
            wid = rng.uniform(2.0, 3.0)
            shift = rng.uniform(-0.3, 0.3)

            def bump(x, a=amp, w=wid, s=shift):
                return a * np.exp(-((np.asarray(x, float) - s) / w) ** 2)

            f = fn_of(bump, -6, 6, modulus=2.0)
            c = bg.rolle_point(f, 0.3, 0.3, shift - 1.0, shift + 1.0)
            assert c == pytest.approx(shift, abs=5e-3)


class TestConvexity:
    def test_parabola_convex(self):
        assert bg.convexity_check(PARAB).convex

    def test_sine_witness(self):
        f = fn_of(np.sin, 0, math.pi, modulus=1.0)
        rep = bg.convexity_check(f)
        assert not rep.convex
        assert rep.witness is not None
        assert 0 <= rep.witness[0] < rep.witness[2] <= math.pi

    def test_affine_boundary_case(self):
        f = fn_of(lambda x: 3.0 * np.asarray(x, float) - 1.0, -2, 2, modulus=3.0)
        assert bg.convexity_check(f).convex
