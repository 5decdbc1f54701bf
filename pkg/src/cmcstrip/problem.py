"""Problem descriptions: strip truncations, boundary-case tags, side policies, solver knobs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .boundary import BoundaryFunction


@dataclass(frozen=True)
class Case:
    """Which uniqueness regime the data belongs to.

    "collin": limiting width 2l = 1/H with convex boundary data.
    "lopez": width 2l = 2*h_t(H) with data satisfying the rho_t(H)-circle
    under condition; carries the neck parameter t.
    """

    kind: str
    t: float | None = None

    def __post_init__(self):
        if self.kind not in ("collin", "lopez"):
            raise ValueError(f"unknown case kind {self.kind!r}")
        if self.kind == "lopez" and (self.t is None or self.t <= 0):
            raise ValueError("lopez case needs a positive neck parameter t")


def collin():
    return Case(kind="collin")


def lopez(t):
    return Case(kind="lopez", t=float(t))


@dataclass(frozen=True)
class ExplicitSides:
    """Dirichlet data on the two truncation edges: arrays (Ny,) or callables of y."""

    left: Union[np.ndarray, Callable]
    right: Union[np.ndarray, Callable]


@dataclass(frozen=True)
class CapSides:
    """Side data from the trace of a tall minimal-surface cap solved on a padded truncation.

    M is the cap height (defaults to sup|f| + 1/(2H) + 1 on the padded
    truncation); pad the extra length on each side (defaults to 4l).
    """

    M: float | None = None
    pad: float | None = None


@dataclass(frozen=True)
class EnvelopeSides:
    """Side data from the comparison-surface lower envelope for the given case."""

    case: Case


SidePolicy = Union[ExplicitSides, CapSides, EnvelopeSides]


@dataclass
class StripProblem:
    """Dirichlet problem for the prescribed-curvature graph equation on a truncated strip.

    The strip is |y| <= l with data f on the long sides; the truncation is
    [x_lo, x_hi] with side data chosen by the policy.  Construction rejects
    widths beyond the solvable bound 2l <= 1/H (equality is the limiting
    case).
    """

    H: float
    l: float
    x_lo: float
    x_hi: float
    nx: int
    ny: int
    boundary: BoundaryFunction
    sides: SidePolicy

    def __post_init__(self):
        if self.H < 0:
            raise ValueError(f"H must be >= 0, got {self.H}")
        if self.l <= 0:
            raise ValueError(f"half-width must be positive, got {self.l}")
        if self.H > 0 and 2.0 * self.l > (1.0 + 1e-12) / self.H:
            raise ValueError(
                f"strip width 2l = {2 * self.l} exceeds the solvable bound 1/H = {1 / self.H}")
        if self.x_hi <= self.x_lo:
            raise ValueError(f"empty truncation [{self.x_lo}, {self.x_hi}]")
        if self.nx < 3 or self.ny < 3:
            raise ValueError("need at least 3 nodes per direction")
        if self.boundary.x_lo > self.x_lo + 1e-12 or self.boundary.x_hi < self.x_hi - 1e-12:
            raise ValueError(
                f"boundary window {self.boundary.window} does not cover the "
                f"truncation [{self.x_lo}, {self.x_hi}]")

    @property
    def xs(self):
        return np.linspace(self.x_lo, self.x_hi, self.nx)

    @property
    def ys(self):
        return np.linspace(-self.l, self.l, self.ny)

    @property
    def hx(self):
        return (self.x_hi - self.x_lo) / (self.nx - 1)

    @property
    def hy(self):
        return 2.0 * self.l / (self.ny - 1)

    def with_truncation(self, x_lo, x_hi, nx=None):
        """Same strip and data on a different truncation (grid spacing kept by default)."""
        if nx is None:
            nx = int(round((x_hi - x_lo) / self.hx)) + 1
        return StripProblem(H=self.H, l=self.l, x_lo=x_lo, x_hi=x_hi,
                            nx=nx, ny=self.ny, boundary=self.boundary,
                            sides=self.sides)


@dataclass(frozen=True)
class SolverConfig:
    """Damped-Newton controls.

    wall_layer is the fraction of the half-width next to each long side
    where y-faces use the singularity-adapted flux relation (vertical
    boundary contact at the limiting width); 0 disables it.
    """

    residual_tol: float = 1e-11
    max_newton: int = 60
    max_halvings: int = 30
    continuation_steps: int = 8
    picard_iters: int = 2
    linear_tol: float = 1e-12
    wall_layer: float = 0.25

    def __post_init__(self):
        if (self.residual_tol <= 0 or self.max_newton <= 0 or self.max_halvings <= 0
                or self.continuation_steps <= 0 or self.picard_iters < 0
                or self.linear_tol <= 0 or not 0.0 <= self.wall_layer <= 1.0):
            raise ValueError("invalid solver configuration")
