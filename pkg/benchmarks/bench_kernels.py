#!/usr/bin/env python3
"""Benchmark the compiled face-flux kernels against the numpy fallback.

The face kernels are the hot loop of every Newton iteration (one
face_fluxes call per Jacobian assembly, one interior_residual call per
line-search trial).  Run:

    python benchmarks/bench_kernels.py [--sizes 129,257,513] [--repeat 7]

Results also confirm the two backends agree to rounding on the same
inputs.
"""

import argparse
import time

import numpy as np

from cmcstrip._kernels import pykernels

try:
    from cmcstrip._kernels import _core
except ImportError:
    _core = None


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(n, repeat):
    rng = np.random.default_rng(0)
    u = np.ascontiguousarray(rng.normal(size=(n, n)) * 2.0)
    hx = hy = 2.0 / (n - 1)
    rows = []
    for name, impl in (("python", pykernels),) + ((("cython", _core),) if _core else ()):
        t_flux = timeit(lambda: impl.face_fluxes(u, hx, hy), repeat)
        t_res = timeit(lambda: impl.interior_residual(u, hx, hy, 0.5), repeat)
        rows.append((name, t_flux, t_res))
    if _core is not None:
        a = pykernels.face_fluxes(u, hx, hy)
        b = _core.face_fluxes(u, hx, hy)
        agree = max(float(np.max(np.abs(x - y))) for x, y in zip(a, b))
    else:
        agree = float("nan")
    return rows, agree


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="129,257,513")
    ap.add_argument("--repeat", type=int, default=7)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    print(f"{'grid':>6} {'backend':>8} {'face_fluxes':>12} {'residual':>12} {'speedup':>8}")
    for n in sizes:
        rows, agree = bench(n, args.repeat)
        base = rows[0]
        for name, t_flux, t_res in rows:
            speed = base[1] / t_flux if t_flux else float("nan")
            print(f"{n:>6} {name:>8} {t_flux * 1e3:>10.2f}ms {t_res * 1e3:>10.2f}ms "
                  f"{speed:>7.2f}x")
        if _core is not None:
            print(f"{'':>6} backends agree to {agree:.2e}")
    if _core is None:
        print("compiled backend not built; only the numpy fallback was timed")


if __name__ == "__main__":
    main()
