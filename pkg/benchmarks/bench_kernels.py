"""Throughput comparison of the compiled and numpy flux kernels.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Times the conservative flux-divergence evaluation (the hot inner kernel of a
step) on representative 1D/2D/3D grids for both backends, plus a short
end-to-end driver run each way.
"""

import argparse
import time

import numpy as np

from eulerlab import euler, initial_data
from eulerlab.euler import kernels, kernels_numpy
from eulerlab.fields import FluidState, VectorField
from eulerlab.grid import Grid


def bench_rhs(shape, dim, repeat):
    rng = np.random.default_rng(0)
    rho = 1.0 + 0.1 * rng.random(shape)
    m = 0.1 * rng.standard_normal(shape + (dim,))
    spacing = (0.01,) * dim
    periodic = (True,) * dim

    def timed(fn):
        fn()  # warm up
        t0 = time.perf_counter()
        for _ in range(repeat):
            fn()
        return (time.perf_counter() - t0) / repeat

    t_np = timed(lambda: kernels_numpy.euler_rhs(rho, m, 2.0, spacing, periodic))
    cells = float(np.prod(shape))
    row = {"grid": "x".join(map(str, shape)), "numpy_ms": 1e3 * t_np,
           "numpy_mcells": cells / t_np / 1e6}
    if kernels.HAVE_COMPILED:
        t_cy = timed(lambda: kernels._rhs_compiled(rho, m, 2.0, spacing, periodic, 1e-14))
        row.update({"compiled_ms": 1e3 * t_cy, "compiled_mcells": cells / t_cy / 1e6,
                    "speedup": t_np / t_cy})
    return row


def bench_driver(backend):
    g = Grid.centered(4.0, 256, dim=2, periodic=True)
    rho = initial_data.bump_density(g, 1e-3, 0.5, 1.0, rho_bar=1.0)
    st = FluidState(rho, VectorField(g, np.zeros(g.shape + (2,))), 2.0)
    cfg = euler.SolverConfig(t_end=0.25, snapshot_stride=10**9, rho_bar=1.0)

    orig = kernels.USE_COMPILED
    kernels.USE_COMPILED = backend == "compiled"
    try:
        t0 = time.perf_counter()
        traj = euler.run(st, cfg)
        dt = time.perf_counter() - t0
    finally:
        kernels.USE_COMPILED = orig
    return dt, traj.step_indices[-1]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()

    print(f"backends available: numpy{' + compiled' if kernels.HAVE_COMPILED else ' only'}")
    print(f"{'grid':>12} {'numpy ms':>10} {'Mcell/s':>9}", end="")
    if kernels.HAVE_COMPILED:
        print(f" {'compiled ms':>12} {'Mcell/s':>9} {'speedup':>8}")
    else:
        print()
    for shape, dim in [((65536,), 1), ((512, 512), 2), ((64, 64, 64), 3)]:
        r = bench_rhs(shape, dim, args.repeat)
        line = f"{r['grid']:>12} {r['numpy_ms']:>10.2f} {r['numpy_mcells']:>9.1f}"
        if "compiled_ms" in r:
            line += f" {r['compiled_ms']:>12.2f} {r['compiled_mcells']:>9.1f} {r['speedup']:>7.1f}x"
        print(line)

    print("\nend-to-end 2D driver (256^2, t=0.25):")
    for backend in (["numpy", "compiled"] if kernels.HAVE_COMPILED else ["numpy"]):
        dt, steps = bench_driver(backend)
        print(f"  {backend:>8}: {dt:.2f}s for {steps} steps ({steps / dt:.0f} steps/s)")


if __name__ == "__main__":
    main()
