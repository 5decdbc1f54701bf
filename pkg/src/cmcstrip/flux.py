"""Flux 1-form of a graph, its line integrals, and the curvature-circle arcs.

For a field u the form is omega = p dy - q dx with

    p = u_x / sqrt(1 + |grad u|^2),   q = u_y / sqrt(1 + |grad u|^2),

the horizontal part of the upward unit normal, so p^2 + q^2 <= 1 pointwise
and |int_gamma omega| <= length(gamma) for every path.  On a solution with
curvature H the form satisfies d(omega) = 2H dx dy, which makes closed-loop
integrals measure 2H times the enclosed area; and a normalized arc flux
approaching 1 signals gradient blow-up with the normal aligned to the
arc's curvature vector.

Gradients are reconstructed nodally (centered differences inside,
one-sided second order on the boundary, where the curvature arcs have
their endpoints), interpolated bilinearly, and normalized at the query
point so the pointwise bound holds by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .field import ScalarField


@dataclass(frozen=True)
class OneFormSample:
    """Components (p, q) of omega = p dy - q dx at one point; p^2 + q^2 <= 1."""

    p: float
    q: float


class FluxForm:
    """Reusable sampler of the flux form of one field."""

    def __init__(self, field: ScalarField):
        self.field = field
        u = field.values
        hx, hy = field.hx, field.hy
        gx = np.empty_like(u)
        gx[:, 1:-1] = (u[:, 2:] - u[:, :-2]) / (2.0 * hx)
        gx[:, 0] = (-3.0 * u[:, 0] + 4.0 * u[:, 1] - u[:, 2]) / (2.0 * hx)
        gx[:, -1] = (3.0 * u[:, -1] - 4.0 * u[:, -2] + u[:, -3]) / (2.0 * hx)
        gy = np.empty_like(u)
        gy[1:-1, :] = (u[2:, :] - u[:-2, :]) / (2.0 * hy)
        gy[0, :] = (-3.0 * u[0, :] + 4.0 * u[1, :] - u[2, :]) / (2.0 * hy)
        gy[-1, :] = (3.0 * u[-1, :] - 4.0 * u[-2, :] + u[-3, :]) / (2.0 * hy)
        self._gx = ScalarField(x=field.x, y=field.y, values=gx, H=field.H)
        self._gy = ScalarField(x=field.x, y=field.y, values=gy, H=field.H)

    def sample(self, px, py):
        """(p, q) arrays at the query points (inside the grid hull)."""
        gx = self._gx.at(px, py)
        gy = self._gy.at(px, py)
        w = np.sqrt(1.0 + gx * gx + gy * gy)
        return gx / w, gy / w


def omega_eval(u: ScalarField, point) -> OneFormSample:
    """Sample the flux form of u at one point."""
    p, q = FluxForm(u).sample(float(point[0]), float(point[1]))
    return OneFormSample(p=float(p), q=float(q))


@dataclass
class ArcPath:
    """Ordered polyline in the plane; orientation is the vertex order."""

    vertices: np.ndarray
    tag: str = ""
    analytic_length: float | None = None

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 2 or len(self.vertices) < 2:
            raise ValueError("path needs at least two plane points")
        seg = np.diff(self.vertices, axis=0)
        if np.any(np.hypot(seg[:, 0], seg[:, 1]) == 0.0):
            raise ValueError("consecutive path vertices must be distinct")

    @property
    def length(self):
        seg = np.diff(self.vertices, axis=0)
        return float(np.sum(np.hypot(seg[:, 0], seg[:, 1])))

    def reversed(self):
        return ArcPath(vertices=self.vertices[::-1].copy(), tag=self.tag + "-reversed",
                       analytic_length=self.analytic_length)


def rectangle_path(x0, x1, y0, y1) -> ArcPath:
    """Counterclockwise rectangle boundary."""
    if x1 <= x0 or y1 <= y0:
        raise ValueError("rectangle must have positive extent")
    verts = np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1], [x0, y0]])
    return ArcPath(vertices=verts, tag=f"rect[{x0},{x1}]x[{y0},{y1}]")


def make_arc(kind, a, H, samples, t=None, side="plus") -> ArcPath:
    """Curvature-1/(2H) circle arc with endpoints on the strip edges.

    kind "collin": the half circle around (a, 0) of radius 1/(2H) on the
    side {x >= a}; passes through (a + 1/(2H), 0).
    kind "lopez": the arc of the circle of radius 1/(2H) centered at
    (a - sqrt(1/(4H^2) - h^2), 0) cut to {x >= a}, with h the neck
    half-height of the family member t; endpoints (a, +-h), and the arc
    passes through (a + K, 0) with K = 1/(2H) - sqrt(1/(4H^2) - h^2).
    side "minus" mirrors the arc to {x <= a}.  The through-point and the
    endpoints are vertices, exactly.
    """
    if H <= 0:
        raise ValueError(f"H must be positive, got {H}")
    if samples < 3:
        raise ValueError("need at least 3 samples")
    n = int(samples) | 1  # odd: the mid vertex is the through-point
    r = 0.5 / H
    if kind == "collin":
        half = 0.5 * math.pi
        cx, top = a, r
        tag = f"C+({a})"
    elif kind == "lopez":
        if t is None or t <= 0:
            raise ValueError("lopez arcs need the neck parameter t > 0")
        from . import nodoid
        h = nodoid.params_from_t(H, t).h
        if not h < r:
            raise ValueError(f"neck half-height {h} must be below 1/(2H) = {r}")
        half = math.asin(h / r)
        cx, top = a - math.sqrt(r * r - h * h), h
        tag = f"C+({a};t={t})"
    else:
        raise ValueError(f"unknown arc kind {kind!r}")
    theta = np.linspace(-half, half, n)
    verts = np.column_stack([cx + r * np.cos(theta), r * np.sin(theta)])
    verts[0] = (a, -top)
    verts[-1] = (a, top)
    verts[n // 2] = (cx + r, 0.0)
    if side == "minus":
        verts[:, 0] = 2.0 * a - verts[:, 0]
        tag = tag.replace("C+", "C-")
    elif side != "plus":
        raise ValueError(f"unknown side {side!r}")
    return ArcPath(vertices=verts, tag=tag, analytic_length=2.0 * half * r)


@dataclass
class FluxValue:
    value: float
    error: float
    length: float


def integrate_along(u: ScalarField, path: ArcPath, *, rel_change=1e-8,
                    max_doublings=14) -> FluxValue:
    """Composite midpoint integral of the flux form along the path.

    Every segment is subdivided; doubling stops once the last change is
    below rel_change * length.  The reported value obeys
    |value| <= length exactly (each midpoint term does).
    """
    form = FluxForm(u)
    verts = path.vertices
    a = verts[:-1]
    d = verts[1:] - verts[:-1]
    length = path.length
    prev = None
    err = math.inf
    value = 0.0
    for level in range(max_doublings + 1):
        m = 1 << level
        frac = (np.arange(m) + 0.5) / m
        pts = a[:, None, :] + d[:, None, :] * frac[None, :, None]
        px = pts[:, :, 0].ravel()
        py = pts[:, :, 1].ravel()
        p, q = form.sample(px, py)
        dx = np.repeat(d[:, 0] / m, m)
        dy = np.repeat(d[:, 1] / m, m)
        # exact summation: reversing the path negates every term, so the
        # rounded total negates exactly as well
        value = math.fsum(p * dy - q * dx)
        if prev is not None:
            err = abs(value - prev)
            if err < rel_change * max(length, 1e-300):
                break
        prev = value
    return FluxValue(value=value, error=err if math.isfinite(err) else 0.0,
                     length=length)


@dataclass
class StokesReport:
    circulation: float
    expected: float
    residual: float
    error: float


def stokes_residual(u: ScalarField, rect) -> StokesReport:
    """|closed-loop integral - 2H * area| for an axis-aligned rectangle.

    Degenerate rectangles (zero area) are integrated as out-and-back paths
    and must give zero.
    """
    x0, x1, y0, y1 = rect
    if x1 < x0 or y1 < y0:
        raise ValueError(f"malformed rectangle {rect}")
    if x1 == x0 or y1 == y0:
        verts = np.array([[x0, y0], [x1, y1], [x0, y0]])
        if x1 == x0 and y1 == y0:
            raise ValueError("rectangle degenerated to a point")
        path = ArcPath(vertices=verts, tag="segment")
        area = 0.0
    else:
        path = rectangle_path(x0, x1, y0, y1)
        area = (x1 - x0) * (y1 - y0)
    flux = integrate_along(u, path)
    expected = 2.0 * u.H * area
    return StokesReport(circulation=flux.value, expected=expected,
                        residual=abs(flux.value - expected), error=flux.error)


@dataclass
class DivergenceReport:
    ratio: float
    flux: float
    length: float
    error: float


def divergence_diagnostic(u: ScalarField, arc: ArcPath) -> DivergenceReport:
    """Normalized arc flux int(omega)/length; near +-1 means the normals
    have turned horizontal along the arc (gradient blow-up)."""
    length = arc.length
    if length <= 0.0:
        raise ValueError("zero-length arc")
    flux = integrate_along(u, arc)
    return DivergenceReport(ratio=flux.value / length, flux=flux.value,
                            length=length, error=flux.error)


def clip_to_region(arc: ArcPath, keep) -> list:
    """Maximal sub-arcs whose vertices satisfy the predicate keep(x, y) -> bool array."""
    mask = np.asarray(keep(arc.vertices[:, 0], arc.vertices[:, 1]), dtype=bool)
    pieces = []
    start = None
    for k, ok in enumerate(mask):
        if ok and start is None:
            start = k
        if (not ok or k == len(mask) - 1) and start is not None:
            stop = k + 1 if ok else k
            if stop - start >= 2:
                pieces.append(ArcPath(vertices=arc.vertices[start:stop].copy(),
                                      tag=arc.tag + f"|clip{len(pieces)}"))
            start = None
    return pieces
