"""Discrete scalar fields on rectangular strip grids, with CSV and binary I/O."""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

_BIN_HEADER = struct.Struct("<qqddddd")  # Nx, Ny, x_lo, x_hi, y_lo, y_hi, H


@dataclass(eq=False)
class ScalarField:
    """Nodal values u on a uniform rectangular grid; values[j, i] at (x[i], y[j])."""

    x: np.ndarray
    y: np.ndarray
    values: np.ndarray
    H: float = 0.0

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (len(self.y), len(self.x)):
            raise ValueError(
                f"values shape {self.values.shape} does not match grid "
                f"({len(self.y)}, {len(self.x)})")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite values")

    @property
    def nx(self):
        return len(self.x)

    @property
    def ny(self):
        return len(self.y)

    @property
    def hx(self):
        return (self.x[-1] - self.x[0]) / (self.nx - 1)

    @property
    def hy(self):
        return (self.y[-1] - self.y[0]) / (self.ny - 1)

    @property
    def boundary_mask(self):
        m = np.zeros(self.values.shape, dtype=bool)
        m[0, :] = m[-1, :] = True
        m[:, 0] = m[:, -1] = True
        return m

    def at(self, px, py):
        """Bilinear interpolation; points must lie inside the grid hull."""
        px = np.asarray(px, dtype=float)
        py = np.asarray(py, dtype=float)
        scalar = px.ndim == 0 and py.ndim == 0
        px, py = np.atleast_1d(px), np.atleast_1d(py)
        sx = 1e-9 * (1.0 + abs(self.x[-1] - self.x[0]))
        sy = 1e-9 * (1.0 + abs(self.y[-1] - self.y[0]))
        if (np.any(px < self.x[0] - sx) or np.any(px > self.x[-1] + sx)
                or np.any(py < self.y[0] - sy) or np.any(py > self.y[-1] + sy)):
            raise ValueError("interpolation point outside the grid hull")
        xi = np.clip((px - self.x[0]) / self.hx, 0.0, self.nx - 1 - 1e-12)
        yj = np.clip((py - self.y[0]) / self.hy, 0.0, self.ny - 1 - 1e-12)
        i = xi.astype(int)
        j = yj.astype(int)
        tx = xi - i
        ty = yj - j
        v = self.values
        out = ((1 - ty) * ((1 - tx) * v[j, i] + tx * v[j, i + 1])
               + ty * ((1 - tx) * v[j + 1, i] + tx * v[j + 1, i + 1]))
        return float(out[0]) if scalar else out

    def symmetry_error(self):
        """max |u(x, y) - u(x, -y)|; requires a y-grid symmetric about 0."""
        if abs(self.y[0] + self.y[-1]) > 1e-12 * (1.0 + abs(self.y[-1])):
            raise ValueError("y grid is not symmetric about 0")
        return float(np.max(np.abs(self.values - self.values[::-1, :])))

    def to_csv(self, path):
        """Write columns x,y,u row-major (y outer); repr floats for byte stability."""
        with open(path, "w", newline="") as fh:
            fh.write("x,y,u\n")
            for j in range(self.ny):
                yj = repr(float(self.y[j]))
                row = self.values[j]
                for i in range(self.nx):
                    fh.write(f"{float(self.x[i])!r},{yj},{float(row[i])!r}\n")

    @classmethod
    def from_csv(cls, path, H=0.0):
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        xs = np.unique(data[:, 0])
        ys = np.unique(data[:, 1])
        vals = np.full((len(ys), len(xs)), np.nan)
        i = np.searchsorted(xs, data[:, 0])
        j = np.searchsorted(ys, data[:, 1])
        vals[j, i] = data[:, 2]
        return cls(x=xs, y=ys, values=vals, H=H)

    def to_binary(self, path):
        """Compact grid format: little-endian header (Nx, Ny, bounds, H), then row-major f64."""
        with open(path, "wb") as fh:
            fh.write(_BIN_HEADER.pack(self.nx, self.ny,
                                      float(self.x[0]), float(self.x[-1]),
                                      float(self.y[0]), float(self.y[-1]),
                                      float(self.H)))
            fh.write(np.ascontiguousarray(self.values, dtype="<f8").tobytes())

    @classmethod
    def from_binary(cls, path):
        with open(path, "rb") as fh:
            nx, ny, x_lo, x_hi, y_lo, y_hi, H = _BIN_HEADER.unpack(
                fh.read(_BIN_HEADER.size))
            vals = np.frombuffer(fh.read(8 * nx * ny), dtype="<f8").reshape(ny, nx)
        return cls(x=np.linspace(x_lo, x_hi, nx), y=np.linspace(y_lo, y_hi, ny),
                   values=vals.copy(), H=H)
