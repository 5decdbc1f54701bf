"""Comparison surfaces: tilted half-cylinders and rotational-neck under-barriers.

A half-cylinder over the strip |y| <= 1/(2H) with its two boundary lines
z = (x-x0)*tan(theta) + z0 is an exact solution of the graph equation; for
convex data every support line yields one, and the pointwise maximum of
the family is a certified lower bound for any solution.  In the rolling
circle regime the same role is played by neck barriers: the neck with
horizontal axis bounded by two copies of a support circle of radius rho.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import nodoid
from .boundary import (BoundaryFunction, CertificationError,
                       check_uniform_under_condition, convexity_check,
                       find_upper_condition_points, lower_support_height)
from .field import ScalarField
from .problem import Case, StripProblem


@dataclass(frozen=True)
class HalfCylinder:
    """Tilted half-cylinder graph over |y| <= 1/(2H), tangent lines at the strip edges."""

    H: float
    x0: float
    z0: float
    theta: float

    def __post_init__(self):
        if self.H <= 0:
            raise ValueError(f"H must be positive, got {self.H}")
        if not -math.pi / 2 < self.theta < math.pi / 2:
            raise ValueError(f"tilt angle must be in (-pi/2, pi/2), got {self.theta}")

    def eval(self, x, y):
        """-(1/cos theta)*sqrt(1/(4H^2) - y^2) + (x-x0)*tan(theta) + z0."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        r = 0.5 / self.H
        if np.any(np.abs(y) > r * (1.0 + 1e-12)):
            raise ValueError(f"|y| exceeds the cylinder strip half-width {r}")
        out = (-np.sqrt(np.maximum(r * r - y * y, 0.0)) / math.cos(self.theta)
               + (x - self.x0) * math.tan(self.theta) + self.z0)
        return float(out) if out.ndim == 0 else out


@dataclass
class NodoidBarrier:
    """Upper sheet of a neck with horizontal axis {x = xc, z = zc} parallel to the y-axis.

    eval returns -inf where the barrier imposes no constraint (outside the
    footprint |x - xc| <= r(y), |y| <= h); absence of a constraint is a
    value, not an error.
    """

    profile: nodoid.NodoidProfile
    xc: float
    zc: float

    def eval(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        scalar = x.ndim == 0 and y.ndim == 0
        x, y = np.broadcast_arrays(np.atleast_1d(x), np.atleast_1d(y))
        h = self.profile.half_height
        out = np.full(x.shape, -np.inf)
        band = np.abs(y) <= h * (1.0 + 1e-9) + 1e-15
        if np.any(band):
            ry = self.profile.r_at(np.minimum(np.abs(y[band]), h))
            bulge = ry * ry - (x[band] - self.xc) ** 2
            vals = np.where(bulge >= 0.0, self.zc + np.sqrt(np.maximum(bulge, 0.0)),
                            -np.inf)
            out[band] = vals
        return float(out[0]) if scalar else out


def _subdifferential_slope(f: BoundaryFunction, x0, delta=None):
    """Midpoint of one-sided difference quotients; exact for quadratics and |x|."""
    if delta is None:
        delta = 1e-5 * (1.0 + abs(x0))
    lo = max(f.x_lo, x0 - delta)
    hi = min(f.x_hi, x0 + delta)
    if hi <= lo:
        raise ValueError(f"window too small around x0={x0}")
    f0, flo, fhi = f(x0), f(lo), f(hi)
    left = (f0 - flo) / (x0 - lo) if x0 > lo else (fhi - f0) / (hi - x0)
    right = (fhi - f0) / (hi - x0) if hi > x0 else left
    return 0.5 * (left + right)


def support_line(f: BoundaryFunction, x0, *, delta=None):
    """Tilt angle theta0 with (x-x0)*tan(theta0) + f(x0) below the graph (convex f)."""
    rep = convexity_check(f)
    if not rep.convex:
        raise CertificationError(
            f"support line needs convex data; violated on triple {rep.witness}")
    return math.atan(_subdifferential_slope(f, x0, delta))


def lower_envelope(f: BoundaryFunction, case: Case, p: StripProblem, *,
                   profile_samples=1201) -> ScalarField:
    """Pointwise maximum of the case's barrier family on the problem grid.

    Every solution with boundary data f dominates this field.  One barrier
    is anchored per boundary grid node; preconditions (convexity, or the
    rho-circle under condition) are certified first and failures carry a
    witness abscissa.
    """
    xs, ys = p.xs, p.ys
    X = np.broadcast_to(xs[None, :], (p.ny, p.nx))
    Y = np.broadcast_to(ys[:, None], (p.ny, p.nx))
    if case.kind == "collin":
        rep = convexity_check(f)
        if not rep.convex:
            raise CertificationError(
                f"convexity fails on sample triple {rep.witness}")
        r = 0.5 / p.H
        if p.l > r * (1.0 + 1e-12):
            raise ValueError(
                f"strip half-width {p.l} exceeds the cylinder half-width {r}")
        root = np.sqrt(np.maximum(r * r - ys * ys, 0.0))[:, None]
        env = np.full((p.ny, p.nx), -np.inf)
        for x0 in xs:
            m = _subdifferential_slope(f, float(x0))
            np.maximum(env, -root * math.sqrt(1.0 + m * m) + (X - x0) * m + f(x0),
                       out=env)
        return ScalarField(x=xs, y=ys, values=env, H=p.H)

    params = nodoid.params_from_t(p.H, case.t)
    if p.l > params.h * (1.0 + 1e-9):
        raise ValueError(
            f"strip half-width {p.l} exceeds the neck half-height {params.h}")
    rho = params.rho
    check = check_uniform_under_condition(f, rho)
    if not check.holds:
        witness = check.violations[0] if len(check.violations) else None
        raise CertificationError(
            f"uniform {rho:.6g}-circle under condition {check.verdict} "
            f"(witness abscissa {witness})")
    prof = nodoid.profile(params, profile_samples)
    env = np.full((p.ny, p.nx), -np.inf)
    top = prof.half_height
    band = np.abs(ys) <= top * (1.0 + 1e-9) + 1e-15
    ry = np.zeros(p.ny)
    ry[band] = prof.r_at(np.minimum(np.abs(ys[band]), top))
    for x0 in xs:
        if x0 - rho < f.x_lo - 1e-12 or x0 + rho > f.x_hi + 1e-12:
            continue  # support circle would leave the data window
        eta = lower_support_height(f, float(x0), rho).height
        cols = np.nonzero(np.abs(xs - x0) <= rho)[0]
        bulge = ry[band, None] ** 2 - (xs[cols][None, :] - x0) ** 2
        vals = np.where(bulge >= 0.0, eta + np.sqrt(np.maximum(bulge, 0.0)), -np.inf)
        sub = env[np.ix_(band, cols)]
        np.maximum(sub, vals, out=sub)
        env[np.ix_(band, cols)] = sub
    if not np.all(np.isfinite(env)):
        j, i = np.argwhere(~np.isfinite(env))[0]
        raise CertificationError(
            f"envelope leaves node (x={xs[i]}, y={ys[j]}) unconstrained; widen the "
            f"data window beyond the truncation by rho={rho:.6g} or refine the grid")
    return ScalarField(x=xs, y=ys, values=env, H=p.H)


def horizontal_cylinder_bound(f: BoundaryFunction, x, H, mode, *, samples=2001):
    """Explicit upper bounds for solution values over the cross-section at x.

    mode "monotone": needs f monotone on a tail [x0, ->) with x >= x0 + 1/H
    (or the mirrored left tail); returns f(x) + 1/(2H).
    mode "upper_circle": needs the 1/(2H)-circle upper condition certified
    at x; returns f(x).
    """
    if H <= 0:
        raise ValueError(f"H must be positive, got {H}")
    if mode == "monotone":
        xs = f.grid(samples)
        d = np.diff(f(xs))
        tol = 1e-12 * (1.0 + float(np.max(np.abs(d))))
        drops = np.nonzero(d < -tol)[0]   # violations of "nondecreasing"
        rises = np.nonzero(d > tol)[0]    # violations of "nonincreasing"
        # earliest abscissa from which f is monotone (either direction) rightwards
        start_up = xs[drops[-1] + 1] if len(drops) else xs[0]
        start_dn = xs[rises[-1] + 1] if len(rises) else xs[0]
        right_start = min(start_up, start_dn)
        if right_start + 1.0 / H <= x <= f.x_hi:
            return f(x) + 0.5 / H
        # latest abscissa up to which f is monotone leftwards
        end_up = xs[drops[0]] if len(drops) else xs[-1]
        end_dn = xs[rises[0]] if len(rises) else xs[-1]
        left_end = max(end_up, end_dn)
        if f.x_lo <= x <= left_end - 1.0 / H:
            return f(x) + 0.5 / H
        raise CertificationError(
            f"monotone-tail bound not certified at x={x}: needs a monotone tail "
            f"starting 1/H={1 / H:.6g} before it (right tail from {right_start}, "
            f"left tail up to {left_end})")
    if mode == "upper_circle":
        pts = find_upper_condition_points(f, 0.5 / H, samples=samples)
        if len(pts) == 0:
            raise CertificationError(
                f"no abscissa satisfies the {0.5 / H:.6g}-circle upper condition")
        gap = float(np.min(np.abs(pts - x)))
        step = (f.x_hi - f.x_lo) / (samples - 1)
        if gap > 2.0 * step:
            raise CertificationError(
                f"upper-circle condition not certified at x={x} "
                f"(nearest certified abscissa at distance {gap:.3e})")
        return float(f(x))
    raise ValueError(f"unknown mode {mode!r}")
