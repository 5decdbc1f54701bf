"""Kernel backend selection.

The compiled Cython kernels are preferred when available; the numpy
implementation is the fallback.  Set CMCSTRIP_PURE_PYTHON=1 to force the
fallback (useful for the backend benchmark and for debugging).
"""

import os

from . import pykernels

if os.environ.get("CMCSTRIP_PURE_PYTHON"):
    _impl = pykernels
    BACKEND = "python"
else:
    try:
        from . import _core as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = pykernels
        BACKEND = "python"

face_fluxes = _impl.face_fluxes
interior_residual = _impl.interior_residual


def backend_name():
    return BACKEND
