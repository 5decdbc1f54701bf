# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled face-flux kernels.

Single-pass loops over the faces of the node grid; semantics identical to
``pykernels`` (same operation order inside each face so results agree to
the last bit on the same inputs).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def face_fluxes(double[:, ::1] u, double hx, double hy):
    cdef Py_ssize_t ny = u.shape[0]
    cdef Py_ssize_t nx = u.shape[1]
    cdef Py_ssize_t j, k, i

    fx_np = np.empty((ny - 2, nx - 1), dtype=np.float64)
    dfxg_np = np.empty((ny - 2, nx - 1), dtype=np.float64)
    dfxq_np = np.empty((ny - 2, nx - 1), dtype=np.float64)
    fy_np = np.empty((ny - 1, nx - 2), dtype=np.float64)
    dfyg_np = np.empty((ny - 1, nx - 2), dtype=np.float64)
    dfyq_np = np.empty((ny - 1, nx - 2), dtype=np.float64)

    cdef double[:, ::1] fx = fx_np
    cdef double[:, ::1] dfxg = dfxg_np
    cdef double[:, ::1] dfxq = dfxq_np
    cdef double[:, ::1] fy = fy_np
    cdef double[:, ::1] dfyg = dfyg_np
    cdef double[:, ::1] dfyq = dfyq_np

    cdef double g, q, w, w3

    for j in range(1, ny - 1):
        for k in range(nx - 1):
            g = (u[j, k + 1] - u[j, k]) / hx
            q = ((u[j + 1, k] - u[j - 1, k]) + (u[j + 1, k + 1] - u[j - 1, k + 1])) / (4.0 * hy)
            w = sqrt(1.0 + g * g + q * q)
            w3 = w * w * w
            fx[j - 1, k] = g / w
            dfxg[j - 1, k] = (1.0 + q * q) / w3
            dfxq[j - 1, k] = -(g * q) / w3

    for j in range(ny - 1):
        for i in range(1, nx - 1):
            g = (u[j + 1, i] - u[j, i]) / hy
            q = ((u[j, i + 1] - u[j, i - 1]) + (u[j + 1, i + 1] - u[j + 1, i - 1])) / (4.0 * hx)
            w = sqrt(1.0 + g * g + q * q)
            w3 = w * w * w
            fy[j, i - 1] = g / w
            dfyg[j, i - 1] = (1.0 + q * q) / w3
            dfyq[j, i - 1] = -(g * q) / w3

    return fx_np, dfxg_np, dfxq_np, fy_np, dfyg_np, dfyq_np


def interior_residual(double[:, ::1] u, double hx, double hy, double H):
    cdef Py_ssize_t ny = u.shape[0]
    cdef Py_ssize_t nx = u.shape[1]
    cdef Py_ssize_t j, k, i

    fx_np = np.empty((ny - 2, nx - 1), dtype=np.float64)
    fy_np = np.empty((ny - 1, nx - 2), dtype=np.float64)
    res_np = np.empty((ny - 2, nx - 2), dtype=np.float64)

    cdef double[:, ::1] fx = fx_np
    cdef double[:, ::1] fy = fy_np
    cdef double[:, ::1] res = res_np

    cdef double g, q

    for j in range(1, ny - 1):
        for k in range(nx - 1):
            g = (u[j, k + 1] - u[j, k]) / hx
            q = ((u[j + 1, k] - u[j - 1, k]) + (u[j + 1, k + 1] - u[j - 1, k + 1])) / (4.0 * hy)
            fx[j - 1, k] = g / sqrt(1.0 + g * g + q * q)

    for j in range(ny - 1):
        for i in range(1, nx - 1):
            g = (u[j + 1, i] - u[j, i]) / hy
            q = ((u[j, i + 1] - u[j, i - 1]) + (u[j + 1, i + 1] - u[j + 1, i - 1])) / (4.0 * hx)
            fy[j, i - 1] = g / sqrt(1.0 + g * g + q * q)

    for j in range(ny - 2):
        for i in range(nx - 2):
            res[j, i] = (fx[j, i + 1] - fx[j, i]) / hx + (fy[j + 1, i] - fy[j, i]) / hy - 2.0 * H

    return res_np
