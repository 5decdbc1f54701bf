import math

import numpy as np
import pytest

from cmcstrip import barrier, nodoid
from cmcstrip.boundary import BoundaryFunction, CertificationError
from cmcstrip.problem import ExplicitSides, StripProblem, collin, lopez


def bf(expr, lo, hi, modulus=None):
    return BoundaryFunction.from_callable(expr, lo, hi, modulus=modulus)


ZERO = bf(lambda x: np.zeros_like(np.asarray(x, float)), -12, 12, modulus=1.0)


def strip(H, l, lo, hi, nx, ny, f):
    return StripProblem(H=H, l=l, x_lo=lo, x_hi=hi, nx=nx, ny=ny, boundary=f,
                        sides=ExplicitSides(left=0.0, right=0.0))


class TestHalfCylinder:
    def test_bottom_value(self):
        hc = barrier.HalfCylinder(H=0.5, x0=0.0, z0=0.0, theta=0.0)
        assert hc.eval(3.0, 0.0) == pytest.approx(-1.0, abs=1e-15)

    def test_strip_edge_is_the_line(self):
        hc = barrier.HalfCylinder(H=0.5, x0=1.0, z0=2.0, theta=0.3)
        for x in (-2.0, 0.0, 5.0):
            want = (x - 1.0) * math.tan(0.3) + 2.0
            assert hc.eval(x, 1.0) == pytest.approx(want, abs=1e-14)
            assert hc.eval(x, -1.0) == pytest.approx(want, abs=1e-14)

    def test_tilted_depth(self):
        H = 1.0
        hc = barrier.HalfCylinder(H=H, x0=0.0, z0=0.0, theta=math.pi / 4)
        assert hc.eval(0.0, 0.0) == pytest.approx(-math.sqrt(2.0) / (2.0 * H),
                                                  abs=1e-14)

    def test_outside_strip_rejected(self):
        hc = barrier.HalfCylinder(H=0.5, x0=0.0, z0=0.0, theta=0.0)
        with pytest.raises(ValueError):
            hc.eval(0.0, 1.5)

    def test_discrete_cmc_residual_second_order(self):
        # the half-cylinder solves the equation exactly: the scheme residual
        # on a smooth interior window must fall ~4x per grid halving
        from cmcstrip.field import ScalarField
        from cmcstrip.solver import assemble_residual
        hc = barrier.HalfCylinder(H=0.5, x0=0.0, z0=0.0, theta=0.4)
        norms = []
        for n in (33, 65, 129):
            xs = np.linspace(-1, 1, n)
            ys = np.linspace(-0.6, 0.6, n)
            X, Y = np.meshgrid(xs, ys)
            fld = ScalarField(x=xs, y=ys, values=hc.eval(X, Y), H=0.5)
            res = assemble_residual(fld, 0.5)
            norms.append(np.max(np.abs(res.values[1:-1, 1:-1])))
        assert norms[0] / norms[1] > 3.4
        assert norms[1] / norms[2] > 3.4


@pytest.fixture(scope="module")
def neck():
    params = nodoid.params_from_t(1.0, 1.0)
    return params, nodoid.profile(params, 801)


class TestNodoidBarrier:

    def test_axis_plane_neck_radius(self, neck):
        params, prof = neck
        nb = barrier.NodoidBarrier(profile=prof, xc=2.0, zc=-1.0)
        assert nb.eval(2.0, 0.0) == pytest.approx(-1.0 + params.t, abs=1e-12)

    def test_edge_plane_max_radius(self, neck):
        params, prof = neck
        nb = barrier.NodoidBarrier(profile=prof, xc=0.0, zc=0.0)
        assert nb.eval(0.0, prof.half_height) == pytest.approx(params.rho, abs=1e-12)
        assert nb.eval(0.0, -prof.half_height) == pytest.approx(params.rho, abs=1e-12)

    def test_equatorial_point(self, neck):
        _, prof = neck
        nb = barrier.NodoidBarrier(profile=prof, xc=0.0, zc=0.5)
        y = 0.21
        assert nb.eval(prof.r_at(y), y) == pytest.approx(0.5, abs=1e-12)

    def test_no_constraint_value(self, neck):
        _, prof = neck
        nb = barrier.NodoidBarrier(profile=prof, xc=0.0, zc=0.0)
        assert nb.eval(10.0, 0.0) == -math.inf
        assert nb.eval(0.0, 2.0) == -math.inf


class TestSupportLine:
    def test_parabola(self):
        f = bf(lambda x: np.asarray(x, float) ** 2, -6, 6, modulus=12.0)
        assert math.tan(barrier.support_line(f, 1.0)) == pytest.approx(2.0, abs=1e-9)

    def test_corner_midpoint_convention(self):
        f = bf(lambda x: np.abs(np.asarray(x, float)), -6, 6, modulus=1.0)
        assert math.tan(barrier.support_line(f, 0.0)) == pytest.approx(0.0, abs=1e-12)

    def test_affine(self):
        f = bf(lambda x: 0.7 * np.asarray(x, float) + 2.0, -6, 6, modulus=1.0)
        for x0 in (-3.0, 0.0, 4.0):
            assert math.tan(barrier.support_line(f, x0)) == pytest.approx(0.7,
                                                                          abs=1e-9)

    def test_line_sits_below(self):
        f = bf(lambda x: np.cosh(np.asarray(x, float)), -3, 3, modulus=11.0)
        x0 = 0.7
        m = math.tan(barrier.support_line(f, x0))
        xs = np.linspace(-3, 3, 500)
        assert np.all((xs - x0) * m + f(x0) <= f(xs) + 1e-8)

    def test_nonconvex_rejected(self):
        f = bf(np.sin, 0, math.pi, modulus=1.0)
        with pytest.raises(CertificationError):
            barrier.support_line(f, 1.0)


class TestLowerEnvelope:
    def test_collin_flat(self):
        p = strip(0.5, 1.0, -4, 4, 41, 17, ZERO)
        env = barrier.lower_envelope(ZERO, collin(), p)
        mid = env.values[8, :]  # y = 0 row
        assert np.max(np.abs(mid + 1.0)) < 1e-12

    def test_collin_affine_is_single_cylinder(self):
        m = 0.7
        f = bf(lambda x: m * np.asarray(x, float), -6, 6, modulus=1.0)
        p = strip(0.5, 1.0, -3, 3, 31, 13, f)
        env = barrier.lower_envelope(f, collin(), p)
        hc = barrier.HalfCylinder(H=0.5, x0=0.0, z0=0.0, theta=math.atan(m))
        X, Y = np.meshgrid(p.xs, p.ys)
        assert np.max(np.abs(env.values - hc.eval(X, Y))) < 1e-9

    def test_lopez_anchor_value(self):
        params = nodoid.params_from_t(1.0, 1.0)
        p = strip(1.0, params.h, -4, 4, 81, 17, ZERO)
        env = barrier.lower_envelope(ZERO, lopez(1.0), p)
        # at an anchored abscissa the neck top sits (rho - t) below the datum
        assert env.values[8, 40] == pytest.approx(-(params.rho - params.t),
                                                  abs=1e-10)

    def test_lopez_needs_under_condition(self):
        cap = bf(lambda x: -np.asarray(x, float) ** 2, -12, 12, modulus=24.0)
        params = nodoid.params_from_t(1.0, 1.0)
        p = strip(1.0, params.h, -2, 2, 41, 9, cap)
        with pytest.raises(CertificationError):
            barrier.lower_envelope(cap, lopez(1.0), p)

    def test_translation_covariance(self):
        params = nodoid.params_from_t(1.0, 1.0)
        p = strip(1.0, params.h, -4, 4, 81, 17, ZERO)
        env = barrier.lower_envelope(ZERO, lopez(1.0), p)
        dz, dx = 2.5, 1.5
        fs = ZERO.shifted(dx, dz)
        ps = strip(1.0, params.h, -4 + dx, 4 + dx, 81, 17, fs)
        env_s = barrier.lower_envelope(fs, lopez(1.0), ps)
        assert np.max(np.abs(env_s.values - (env.values + dz))) == 0.0

    def test_envelope_below_every_solution_datum(self):
        # the envelope never exceeds the boundary datum on the strip edges
        f = bf(lambda x: np.asarray(x, float) ** 2, -12, 12, modulus=24.0)
        p = strip(0.5, 1.0, -4, 4, 41, 17, f)
        env = barrier.lower_envelope(f, collin(), p)
        assert np.all(env.values[0, :] <= f(p.xs) + 1e-10)
        assert np.all(env.values[-1, :] <= f(p.xs) + 1e-10)


class TestHorizontalCylinderBound:
    def test_monotone_line(self):
        f = bf(lambda x: np.asarray(x, float), -8, 8, modulus=1.0)
        assert barrier.horizontal_cylinder_bound(f, 5.0, 0.5, "monotone") == \
            pytest.approx(6.0)

    def test_monotone_needs_distance(self):
        f = bf(lambda x: np.asarray(x, float) ** 2, -8, 8, modulus=16.0)
        with pytest.raises(CertificationError):
            barrier.horizontal_cylinder_bound(f, 1.0, 0.5, "monotone")

    def test_upper_circle_flat(self):
        assert barrier.horizontal_cylinder_bound(ZERO, 1.3, 0.5, "upper_circle") == 0.0

    def test_upper_circle_cap_vertex(self):
        # -x^2 has osculating radius 1/2 at the vertex: a 1/(2H)-disk with
        # 1/(2H) <= 1/2 fits above it, certifying the bound f(0) = 0
        f = bf(lambda x: -np.asarray(x, float) ** 2, -6, 6, modulus=12.0)
        assert barrier.horizontal_cylinder_bound(f, 0.0, 1.0, "upper_circle") == \
            pytest.approx(0.0, abs=1e-15)

    def test_upper_circle_uncertified(self):
        # above +x^2 the unit disk cannot touch the vertex
        f = bf(lambda x: np.asarray(x, float) ** 2, -6, 6, modulus=12.0)
        with pytest.raises(CertificationError):
            barrier.horizontal_cylinder_bound(f, 0.0, 0.5, "upper_circle")
