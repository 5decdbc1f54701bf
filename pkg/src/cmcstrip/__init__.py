"""Desk-scale numerics for constant-mean-curvature graphs over strips.

Subpackages cover the rotational neck family used as lower barriers, the
rolling-circle boundary certificates, comparison surfaces, the damped
Newton Dirichlet solver with its extremal-field squeeze diagnostic, and
the flux 1-form machinery.
"""

from . import barrier, boundary, field, flux, nodoid, problem, solver
from ._kernels import backend_name

__version__ = "0.1.0"

__all__ = [
    "barrier",
    "boundary",
    "field",
    "flux",
    "nodoid",
    "problem",
    "solver",
    "backend_name",
    "__version__",
]
