"""One-parameter family of rotational CMC necks used as lower barriers.

A neck with mean curvature H > 0 is described by its minimal radius t.
Derived quantities: the maximal radius rho, the first-integral constant
c = H*rho^2 = H*t^2 + t, and the half-height h obtained by quadrature of

    h = int_t^rho  H*(rho^2 - x^2) / sqrt(x^2 - H^2*(rho^2 - x^2)^2) dx.

The integrand has an inverse-square-root singularity at x = t (the
denominator factors as (x - H*(rho^2 - x^2)) * (x + H*(rho^2 - x^2)) and
the first factor vanishes there).  Substituting x = t + s^2 removes it
exactly: with S = sqrt(rho - t),

    x - H*(rho^2 - x^2) = s^2 * (1 + 2*H*t + H*s^2),

so the transformed integrand is smooth on [0, S].  Plain uniform rules on
the original variable are not used anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator

DEFAULT_QUAD_TOL = 1e-10

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


class QuadratureError(RuntimeError):
    """Raised when the half-height quadrature cannot reach the requested tolerance."""


def t_from_c(H, c):
    """Neck radius from the first-integral constant: nonnegative root of H*t^2 + t = c."""
    if H <= 0:
        raise ValueError(f"mean curvature must be positive, got H={H}")
    if c < 0:
        raise ValueError(f"first-integral constant must be nonnegative, got c={c}")
    # 2c/(1+sqrt(1+4Hc)) equals (-1+sqrt(1+4Hc))/(2H) without cancellation at small c
    return 2.0 * c / (1.0 + math.sqrt(1.0 + 4.0 * H * c))


def neck_gap(H, t):
    """rho - t, computed in cancellation-free form (t/H)/(rho + t)."""
    if H <= 0 or t <= 0:
        raise ValueError(f"need H > 0 and t > 0, got H={H}, t={t}")
    rho = math.sqrt(t * t + t / H)
    return (t / H) / (rho + t)


@dataclass(frozen=True)
class NodoidParams:
    """One member of the neck family: (H, t, c, rho, h) with h_error the quadrature estimate."""

    H: float
    t: float
    c: float
    rho: float
    h: float
    h_error: float = 0.0

    def validate(self, tol=1e-9):
        """Check the defining consistency relations to relative tolerance."""
        scale = 1.0 + abs(self.c)
        if abs(self.c - self.H * self.rho**2) > tol * scale:
            raise ValueError("c != H*rho^2")
        if abs(self.t - t_from_c(self.H, self.c)) > tol * (1.0 + self.t):
            raise ValueError("t is not the root of H*t^2 + t = c")
        if not (0.0 < self.t < self.rho):
            raise ValueError("need 0 < t < rho")
        if not (0.0 < self.h < 0.5 / self.H):
            raise ValueError("need 0 < h < 1/(2H)")
        return self


def _height_integrand(s, H, t, rho, S2):
    """Smooth transformed integrand; s may be an array."""
    x = t + s * s
    d = (S2 - s * s) * (rho + x)  # rho^2 - x^2, cancellation-free
    return 2.0 * H * d / np.sqrt((1.0 + 2.0 * H * t + H * s * s) * (x + H * d))


def params_from_t(H, t, tol=DEFAULT_QUAD_TOL):
    """Fill (c, rho, h) for a neck of minimal radius t; h by adaptive quadrature."""
    if H <= 0 or t <= 0:
        raise ValueError(f"need H > 0 and t > 0, got H={H}, t={t}")
    rho = math.sqrt(t * t + t / H)
    c = H * rho * rho
    S = math.sqrt(neck_gap(H, t))
    S2 = S * S
    h, err = quad(_height_integrand, 0.0, S, args=(H, t, rho, S2),
                  epsabs=tol, epsrel=1e-13, limit=200)
    if err > 10.0 * max(tol, abs(h) * 1e-12):
        raise QuadratureError(
            f"half-height quadrature reached abs error {err:.3e} > requested {tol:.3e} "
            f"(H={H}, t={t})")
    return NodoidParams(H=float(H), t=float(t), c=c, rho=rho, h=h, h_error=err)


@dataclass
class NodoidProfile:
    """Monotone table (u, r) of the even profile on [0, h]: r(0)=t, r(h)=rho.

    The table is produced by cumulative Gauss-Legendre integration of the
    desingularized height integrand on a uniform grid of the substitution
    variable.  Inversion r(u) uses monotone cubic interpolation with a
    table-bisection fallback, and the even extension for u < 0.
    """

    params: NodoidParams
    u: np.ndarray
    r: np.ndarray
    _interp: PchipInterpolator | None = field(default=None, repr=False, compare=False)

    @property
    def half_height(self):
        """Table half-height (matches params.h to quadrature accuracy)."""
        return float(self.u[-1])

    def r_at(self, uq):
        """Radius at height uq, |uq| <= h (even extension); rejects queries outside."""
        uq = np.asarray(uq, dtype=float)
        scalar = uq.ndim == 0
        uu = np.abs(np.atleast_1d(uq))
        top = self.half_height
        slack = 1e-9 * (1.0 + top)
        if np.any(uu > top + slack):
            bad = float(uu[np.argmax(uu)])
            raise ValueError(f"profile query u={bad} outside [-{top}, {top}]")
        uu = np.minimum(uu, top)
        if self._interp is None:
            self._interp = PchipInterpolator(self.u, self.r, extrapolate=False)
        out = self._interp(uu)
        # monotone fallback: clip to the bracketing table pair when the
        # interpolant escapes it (cannot happen for pchip, kept as a guard)
        idx = np.clip(np.searchsorted(self.u, uu, side="right") - 1, 0, len(self.u) - 2)
        lo, hi = self.r[idx], self.r[idx + 1]
        bad = (out < lo) | (out > hi) | ~np.isfinite(out)
        if np.any(bad):
            du = self.u[idx + 1] - self.u[idx]
            w = np.where(du > 0, (uu - self.u[idx]) / np.where(du > 0, du, 1.0), 0.0)
            out = np.where(bad, lo + w * (hi - lo), out)
        return float(out[0]) if scalar else out

    def eq1_residuals(self):
        """First-integral residual H*r^2 + r/sqrt(1+r'^2) - c at interior samples.

        r' is taken from the table by centered differences; the endpoint
        u = h (where r' blows up) is excluded by construction.
        """
        H, c = self.params.H, self.params.c
        rp = (self.r[2:] - self.r[:-2]) / (self.u[2:] - self.u[:-2])
        rm = self.r[1:-1]
        return H * rm * rm + rm / np.sqrt(1.0 + rp * rp) - c


def profile(params: NodoidParams, n: int) -> NodoidProfile:
    """Tabulate the profile with n samples uniformly spaced in the substitution variable."""
    if n < 2:
        raise ValueError(f"grid size must be >= 2, got {n}")
    H, t, rho = params.H, params.t, params.rho
    S = math.sqrt(rho - t)
    s = np.linspace(0.0, S, n)
    r = t + s * s
    r[-1] = rho
    # cumulative per-cell Gauss-Legendre of the smooth integrand
    mid = 0.5 * (s[:-1] + s[1:])
    half = 0.5 * (s[1:] - s[:-1])
    pts = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = _height_integrand(pts, H, t, rho, S * S)
    increments = (vals @ _GL_WEIGHTS) * half
    u = np.concatenate([[0.0], np.cumsum(increments)])
    return NodoidProfile(params=params, u=u, r=r)
