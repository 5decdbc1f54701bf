"""Boundary data and the circle conditions it must certify.

The boundary datum is a continuous function f on a finite window.  Both
uniqueness regimes come with hypotheses on f that are checked here by
sweeping circle centers over a sample grid:

* the uniform under condition with radius R: a radius-R disk can roll
  below the graph touching every point;
* the upper condition at a: a radius-R disk inside the epigraph touches
  the graph at (a, f(a)).

All verdicts are certificates **on the tested subwindow** (the window
minus an R-margin) at the sweep resolution; they are deterministic for
fixed inputs.  Argmin/argmax sets that are flat to tolerance are treated
as intervals and reported by their leftmost grid representative.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

_CHUNK = 64  # centers per vectorized block in the sweeps


class CertificationError(ValueError):
    """A geometric hypothesis could not be certified; carries a witness."""


@dataclass
class BoundaryFunction:
    """Boundary datum on [x_lo, x_hi]: closed-form callable or uniform samples.

    modulus is an optional Lipschitz/curvature hint used for touch
    tolerances and the sample-continuity check.
    """

    x_lo: float
    x_hi: float
    fn: Callable | None = None
    xs: np.ndarray | None = None
    ys: np.ndarray | None = None
    modulus: float | None = None

    def __post_init__(self):
        if self.x_hi <= self.x_lo:
            raise ValueError(f"empty window [{self.x_lo}, {self.x_hi}]")
        if (self.fn is None) == (self.xs is None):
            raise ValueError("provide exactly one of a callable or samples")
        if self.xs is not None:
            self.xs = np.asarray(self.xs, dtype=float)
            self.ys = np.asarray(self.ys, dtype=float)
            if self.xs.ndim != 1 or self.xs.shape != self.ys.shape or len(self.xs) < 2:
                raise ValueError("samples must be two equal-length 1d arrays")
            if np.any(np.diff(self.xs) <= 0):
                raise ValueError("sample abscissas must be strictly increasing")
            if self.modulus is not None:
                delta = np.diff(self.xs)
                jump = np.abs(np.diff(self.ys))
                bad = jump > self.modulus * delta * (1.0 + 1e-9) + 1e-12
                if np.any(bad):
                    k = int(np.argmax(bad))
                    raise ValueError(
                        f"samples violate the continuity hint at x={self.xs[k]}: "
                        f"jump {jump[k]:.3e} over step {delta[k]:.3e}")

    @classmethod
    def from_callable(cls, fn, x_lo, x_hi, modulus=None):
        return cls(x_lo=float(x_lo), x_hi=float(x_hi), fn=fn, modulus=modulus)

    @classmethod
    def from_samples(cls, xs, ys, modulus=None):
        xs = np.asarray(xs, dtype=float)
        return cls(x_lo=float(xs[0]), x_hi=float(xs[-1]), xs=xs,
                   ys=np.asarray(ys, dtype=float), modulus=modulus)

    @classmethod
    def from_csv(cls, path, modulus=None):
        """Load columns x, f from a CSV file (header row optional)."""
        xs, ys = [], []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row:
                    continue
                try:
                    x, y = float(row[0]), float(row[1])
                except ValueError:
                    continue  # header
                xs.append(x)
                ys.append(y)
        if len(xs) < 2:
            raise ValueError(f"boundary CSV {path} has fewer than 2 numeric rows")
        return cls.from_samples(np.asarray(xs), np.asarray(ys), modulus=modulus)

    @property
    def window(self):
        return (self.x_lo, self.x_hi)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        slack = 1e-9 * (1.0 + self.x_hi - self.x_lo)
        if np.any(x < self.x_lo - slack) or np.any(x > self.x_hi + slack):
            raise ValueError(
                f"query outside boundary window [{self.x_lo}, {self.x_hi}]")
        xq = np.clip(x, self.x_lo, self.x_hi)
        if self.fn is not None:
            out = np.asarray(self.fn(xq), dtype=float)
        else:
            out = np.interp(xq, self.xs, self.ys)
        return float(out) if x.ndim == 0 else out

    def grid(self, n):
        return np.linspace(self.x_lo, self.x_hi, int(n))

    def shifted(self, dx, dz):
        """Translate the datum by (dx, dz); used by covariance tests."""
        if self.fn is not None:
            base = self.fn
            return BoundaryFunction.from_callable(
                lambda x, _b=base, _dx=dx, _dz=dz: np.asarray(_b(np.asarray(x) - _dx)) + _dz,
                self.x_lo + dx, self.x_hi + dx, modulus=self.modulus)
        return BoundaryFunction.from_samples(self.xs + dx, self.ys + dz,
                                             modulus=self.modulus)


def touch_tolerance(delta, modulus=None):
    """Tangency-detection tolerance: max(1e-8, 10*delta^2*curvature hint)."""
    return max(1e-8, 10.0 * delta * delta * (modulus if modulus else 1.0))


@dataclass
class SupportContact:
    """Lower support circle result: center height and the touched abscissas."""

    height: float
    touches: np.ndarray
    tol: float


def lower_support_height(f: BoundaryFunction, a, R, *, samples=2001, tol=None):
    """Highest center height s*(a) of a radius-R disk below the graph, with contacts.

    s*(a) = min over |x-a| <= R of f(x) - sqrt(R^2 - (x-a)^2); the disk
    centered at (a, s*(a)) lies weakly below the graph and touches it on
    the returned argmin set.
    """
    if a - R < f.x_lo - 1e-12 or a + R > f.x_hi + 1e-12:
        raise ValueError(
            f"support circle [a-R, a+R] = [{a - R}, {a + R}] exceeds window {f.window}")
    xs = np.linspace(max(a - R, f.x_lo), min(a + R, f.x_hi), int(samples))
    gap = f(xs) - np.sqrt(np.maximum(0.0, R * R - (xs - a) ** 2))
    s = float(np.min(gap))
    if tol is None:
        tol = touch_tolerance(xs[1] - xs[0], f.modulus)
    return SupportContact(height=s, touches=xs[gap - s <= tol], tol=tol)


@dataclass
class CircleConditionReport:
    """Verdict of a rolling-circle sweep on the tested subwindow."""

    radius: float
    verdict: str  # "holds" | "fails" | "inconclusive"
    touched: np.ndarray
    violations: np.ndarray
    subwindow: tuple
    resolution: float
    tol: float

    @property
    def holds(self):
        return self.verdict == "holds"


def check_uniform_under_condition(f: BoundaryFunction, R, tol=None, *,
                                  centers=801, samples=2001):
    """Sweep disk centers below the graph and check every abscissa gets touched.

    Touch points are accumulated from the argmin sets of the support-height
    sweep; the verdict asks every abscissa of the certifiable subwindow to
    lie within the sweep resolution of a touch point.  The subwindow keeps a
    2R margin: a contact can sit up to R sideways of its center, and centers
    themselves need an R margin.  Sweeps that cannot resolve the geometry
    report "inconclusive" instead of guessing.
    """
    lo, hi = f.window
    if hi - lo < 2.0 * R:
        raise ValueError(f"window {f.window} narrower than 2R = {2 * R}")
    xs = np.linspace(lo, hi, int(samples))
    delta = xs[1] - xs[0]
    fx = f(xs)
    if tol is None:
        tol = touch_tolerance(delta, f.modulus)
    sub_lo, sub_hi = lo + 2.0 * R, hi - 2.0 * R
    sub_mask = (xs >= sub_lo - 1e-12) & (xs <= sub_hi + 1e-12)
    ctrs = np.linspace(lo + R, hi - R, int(centers))
    c_step = (ctrs[-1] - ctrs[0]) / (len(ctrs) - 1) if len(ctrs) > 1 else math.inf
    if sub_mask.sum() < 3 or delta > R / 4.0 or c_step > R / 4.0:
        return CircleConditionReport(R, "inconclusive", xs[:0], xs[sub_mask],
                                     (sub_lo, sub_hi), delta, tol)
    touched = np.zeros(len(xs), dtype=bool)
    for k in range(0, len(ctrs), _CHUNK):
        block = ctrs[k:k + _CHUNK, None]
        d2 = R * R - (xs[None, :] - block) ** 2
        inside = d2 >= 0.0
        gap = np.where(inside, fx[None, :] - np.sqrt(np.maximum(d2, 0.0)), np.inf)
        smin = gap.min(axis=1, keepdims=True)
        touched |= np.any(inside & (gap - smin <= tol), axis=0)
        touched[np.argmin(gap, axis=1)] = True  # argmin itself, however thin its basin
    cover = 2.0 * max(delta, c_step)
    touch_xs = xs[touched]
    if len(touch_xs) == 0:
        return CircleConditionReport(R, "fails", touch_xs, xs[sub_mask],
                                     (sub_lo, sub_hi), delta, tol)
    sub_xs = xs[sub_mask]
    pos = np.searchsorted(touch_xs, sub_xs)
    left = np.abs(sub_xs - touch_xs[np.clip(pos - 1, 0, len(touch_xs) - 1)])
    right = np.abs(touch_xs[np.clip(pos, 0, len(touch_xs) - 1)] - sub_xs)
    uncovered = np.minimum(left, right) > cover
    violations = sub_xs[uncovered]
    verdict = "holds" if len(violations) == 0 else "fails"
    return CircleConditionReport(R, verdict, touch_xs, violations,
                                 (sub_lo, sub_hi), delta, tol)


def find_upper_condition_points(f: BoundaryFunction, R, *, centers=801,
                                samples=2001, tol=None):
    """Abscissas where a radius-R disk inside the epigraph touches the graph.

    Sweeps centers a and collects the argmax sets of
    f(x) + sqrt(R^2 - (x-a)^2); every closed subinterval of length 2R of
    the tested subwindow contains at least one returned point.
    """
    lo, hi = f.window
    if hi - lo < 2.0 * R:
        raise ValueError(f"window {f.window} narrower than 2R = {2 * R}")
    xs = np.linspace(lo, hi, int(samples))
    delta = xs[1] - xs[0]
    fx = f(xs)
    if tol is None:
        tol = touch_tolerance(delta, f.modulus)
    ctrs = np.linspace(lo + R, hi - R, int(centers))
    marked = np.zeros(len(xs), dtype=bool)
    for k in range(0, len(ctrs), _CHUNK):
        block = ctrs[k:k + _CHUNK, None]
        d2 = R * R - (xs[None, :] - block) ** 2
        inside = d2 >= 0.0
        lid = np.where(inside, fx[None, :] + np.sqrt(np.maximum(d2, 0.0)), -np.inf)
        smax = lid.max(axis=1, keepdims=True)
        marked |= np.any(inside & (smax - lid <= tol), axis=0)
    return xs[marked]


def _contact_slope(a, fa, center_x, center_y, vertical_eps):
    """Tangent slope of a circle at the contact point (a, fa); signed inf if vertical."""
    den = fa - center_y
    if abs(den) <= vertical_eps:
        return math.copysign(math.inf, center_x - a)
    return -(a - center_x) / den


def pinched_slope(f: BoundaryFunction, a, R_under, R_upper, *,
                  centers=2001, samples=2001, agree_tol=0.05):
    """Common tangent slope of the under and upper circles pinching the graph at a.

    Requires both certifications; the two slopes must agree to tolerance.
    Returns +-inf (with well-defined sign) when the tangent is vertical.
    """
    fa = f(a)
    xs = np.linspace(f.x_lo, f.x_hi, int(samples))
    fx = f(xs)

    def best_center(upper):
        R = R_upper if upper else R_under
        c_lo = max(a - R, f.x_lo + R)
        c_hi = min(a + R, f.x_hi - R)
        if c_hi < c_lo:
            raise CertificationError(
                f"no admissible circle centers for abscissa a={a} within window {f.window}")
        ctrs = np.linspace(c_lo, c_hi, int(centers))
        best = (np.inf, None, None)
        for k in range(0, len(ctrs), _CHUNK):
            block = ctrs[k:k + _CHUNK]
            d2 = R * R - (xs[None, :] - block[:, None]) ** 2
            inside = d2 >= 0.0
            arc = np.sqrt(np.maximum(d2, 0.0))
            if upper:
                s = np.where(inside, fx[None, :] + arc, -np.inf).max(axis=1)
                at_a = s - np.sqrt(np.maximum(0.0, R * R - (a - block) ** 2))
            else:
                s = np.where(inside, fx[None, :] - arc, np.inf).min(axis=1)
                at_a = s + np.sqrt(np.maximum(0.0, R * R - (a - block) ** 2))
            mis = np.where(np.abs(a - block) <= R, np.abs(fa - at_a), np.inf)
            j = int(np.argmin(mis))
            if mis[j] < best[0]:
                best = (float(mis[j]), float(block[j]), float(s[j]))
        return best

    delta = (f.x_hi - f.x_lo) / (samples - 1)
    tol = touch_tolerance(delta, f.modulus) * 10.0
    mis_u, cu, su = best_center(upper=False)
    if cu is None or mis_u > tol:
        raise CertificationError(
            f"under condition (R={R_under}) not certified at a={a}: "
            f"best contact mismatch {mis_u:.3e}")
    mis_o, co, so = best_center(upper=True)
    if co is None or mis_o > tol:
        raise CertificationError(
            f"upper condition (R={R_upper}) not certified at a={a}: "
            f"best contact mismatch {mis_o:.3e}")
    vertical_eps = 1e-6 * max(R_under, R_upper)
    s_under = _contact_slope(a, fa, cu, su, vertical_eps)
    s_upper = _contact_slope(a, fa, co, so, vertical_eps)
    if math.isinf(s_under) or math.isinf(s_upper):
        return s_under if math.isinf(s_under) else s_upper
    if abs(s_under - s_upper) > agree_tol * (1.0 + abs(s_under) + abs(s_upper)):
        raise CertificationError(
            f"pinching circles disagree at a={a}: slopes {s_under:.4f} vs {s_upper:.4f}")
    return 0.5 * (s_under + s_upper)


def rolle_point(f: BoundaryFunction, R_under, R_upper, a, b, *,
                samples=4001, slope_tol=0.05):
    """Interior critical abscissa between a and b (leftmost argmax convention).

    Preconditions: the uniform under condition holds, the upper condition
    is certified at a and b, and the pinched slopes there are > 0 and < 0.
    The returned point again satisfies the upper condition with slope 0.
    """
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")
    under = check_uniform_under_condition(f, R_under)
    if not under.holds:
        raise CertificationError(
            f"uniform under condition (R={R_under}) fails; "
            f"first violation near x={under.violations[0] if len(under.violations) else '?'}")
    sa = pinched_slope(f, a, R_under, R_upper)
    sb = pinched_slope(f, b, R_under, R_upper)
    if not (sa > 0.0 and sb < 0.0):
        raise CertificationError(
            f"slope sign test fails: slope(a)={sa:.4f} (need > 0), "
            f"slope(b)={sb:.4f} (need < 0)")
    xs = np.linspace(a, b, int(samples))
    vals = f(xs)
    m = float(np.max(vals))
    ptol = 1e-12 * (1.0 + abs(m))
    c = float(xs[int(np.argmax(vals >= m - ptol))])
    # postconditions guaranteed by the flat-majorant argument; verified defensively
    pts = find_upper_condition_points(f, R_upper)
    gap = float(np.min(np.abs(pts - c))) if len(pts) else math.inf
    if gap > 4.0 * (xs[1] - xs[0]) + 4.0 * (f.x_hi - f.x_lo) / 2000.0:
        raise CertificationError(
            f"argmax c={c} is not among the certified upper-condition points "
            f"(nearest at distance {gap:.3e})")
    sc = pinched_slope(f, c, R_under, R_upper)
    if not abs(sc) <= slope_tol:
        raise CertificationError(f"pinched slope at c={c} is {sc:.4f}, expected 0")
    return c


@dataclass
class ConvexityReport:
    convex: bool
    witness: tuple | None
    min_second_difference: float


def convexity_check(f: BoundaryFunction, *, samples=801, tol=None):
    """Midpoint-convexity check on uniform sample triples; returns the violating triple."""
    if samples < 3:
        raise ValueError("need at least 3 samples")
    xs = np.linspace(f.x_lo, f.x_hi, int(samples))
    ys = f(xs)
    d2 = ys[:-2] - 2.0 * ys[1:-1] + ys[2:]
    if tol is None:
        tol = 1e-10 * (1.0 + float(np.max(np.abs(ys))))
    k = int(np.argmin(d2))
    worst = float(d2[k])
    if worst < -tol:
        return ConvexityReport(False, (float(xs[k]), float(xs[k + 1]), float(xs[k + 2])),
                               worst)
    return ConvexityReport(True, None, worst)
