"""Pure-numpy face-flux kernels.

Reference implementation of the hot loops of the divergence-form
discretization.  The compiled backend in ``_core.pyx`` mirrors these
semantics exactly; tests assert agreement between the two.

Face layout for a node grid ``u`` of shape (Ny, Nx):

* x-faces sit between nodes ``(j, k)`` and ``(j, k+1)`` for rows
  ``j = 1 .. Ny-2`` (the rows where the transverse stencil fits),
  giving arrays of shape ``(Ny-2, Nx-1)``.
* y-faces sit between nodes ``(j, i)`` and ``(j+1, i)`` for columns
  ``i = 1 .. Nx-2``, giving arrays of shape ``(Ny-1, Nx-2)``.

Each face carries the flux component F = g/W with W = sqrt(1+g^2+q^2),
where g is the two-point gradient across the face and q the averaged
transverse gradient.  The transverse average is written as a sum of two
differences so that mirroring the grid negates it bit-exactly.
"""

from __future__ import annotations

import numpy as np


def face_fluxes(u, hx, hy):
    """Fluxes and their partials w.r.t. (g, q) on all interior faces.

    Returns (Fx, dFx_dg, dFx_dq, Fy, dFy_dg, dFy_dq).
    """
    gx = (u[1:-1, 1:] - u[1:-1, :-1]) / hx
    qx = ((u[2:, :-1] - u[:-2, :-1]) + (u[2:, 1:] - u[:-2, 1:])) / (4.0 * hy)
    wx = np.sqrt(1.0 + gx * gx + qx * qx)
    wx3 = wx * wx * wx
    fx = gx / wx
    dfx_dg = (1.0 + qx * qx) / wx3
    dfx_dq = -(gx * qx) / wx3

    gy = (u[1:, 1:-1] - u[:-1, 1:-1]) / hy
    qy = ((u[:-1, 2:] - u[:-1, :-2]) + (u[1:, 2:] - u[1:, :-2])) / (4.0 * hx)
    wy = np.sqrt(1.0 + gy * gy + qy * qy)
    wy3 = wy * wy * wy
    fy = gy / wy
    dfy_dg = (1.0 + qy * qy) / wy3
    dfy_dq = -(gy * qy) / wy3

    return fx, dfx_dg, dfx_dq, fy, dfy_dg, dfy_dq


def interior_residual(u, hx, hy, H):
    """Divergence of the face fluxes minus 2H at interior nodes.

    Shape (Ny-2, Nx-2).  Cheaper than face_fluxes when derivatives are
    not needed (line searches call this repeatedly).
    """
    gx = (u[1:-1, 1:] - u[1:-1, :-1]) / hx
    qx = ((u[2:, :-1] - u[:-2, :-1]) + (u[2:, 1:] - u[:-2, 1:])) / (4.0 * hy)
    fx = gx / np.sqrt(1.0 + gx * gx + qx * qx)

    gy = (u[1:, 1:-1] - u[:-1, 1:-1]) / hy
    qy = ((u[:-1, 2:] - u[:-1, :-2]) + (u[1:, 2:] - u[1:, :-2])) / (4.0 * hx)
    fy = gy / np.sqrt(1.0 + gy * gy + qy * qy)

    return (fx[:, 1:] - fx[:, :-1]) / hx + (fy[1:, :] - fy[:-1, :]) / hy - 2.0 * H
