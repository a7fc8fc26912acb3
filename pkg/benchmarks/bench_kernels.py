"""Time the numba kernels against their numpy counterparts.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``.  Both paths are
timed in one process regardless of ``LOGIGROWTH_DISABLE_JIT``; the first
jitted call (compilation) is excluded and reported separately.
"""

import argparse
import timeit

import numpy as np

from logigrowth import _kernels as k


def cases(rng):
    x0 = rng.uniform(1, 200, 1_000_000)
    t = rng.uniform(-2, 2, x0.size)
    K = rng.uniform(1, 150, 1_000_000)
    L = rng.uniform(1, 150, K.size)
    grid = np.linspace(0.5, 150, 400, endpoint=False)
    ts = np.linspace(0, 69, 1_000_000)
    f5 = (120.0, 113.0, 115.0, 0.4, 0.6, 1.18)
    return {
        "logistic_flow (1e6)": (k.logistic_flow_np, k.logistic_flow_jit, (x0, t, 0.3, 100.0)),
        "f5_values (1e6)": (k.f5_values_np, k.f5_values_jit, (K, L, *f5)),
        "profit_grid_argmax (400x400)": (k.profit_grid_argmax_np, k.profit_grid_argmax_jit,
                                         (grid, grid, *f5, 1.0, 0.5, 0.5)),
        "sigma1 (1e6)": (k.sigma1_np, k.sigma1_jit,
                         (ts, 0.203, 0.129, 0.432, 0.118, 150.0, 150.0, k.SIGMA1_REPORTED)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not k.HAVE_NUMBA:
        print("numba is not installed; only the numpy path exists")
    rng = np.random.default_rng(0)
    print(f"{'kernel':32s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s} {'compile s':>10s}")
    for name, (fnp, fjit, fargs) in cases(rng).items():
        t0 = timeit.default_timer()
        fjit(*fargs)
        compile_s = timeit.default_timer() - t0
        tn = min(timeit.repeat(lambda: fnp(*fargs), number=1, repeat=args.repeat)) * 1e3
        tj = min(timeit.repeat(lambda: fjit(*fargs), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:32s} {tn:10.2f} {tj:10.2f} {tn / tj:8.2f} {compile_s:10.2f}")


if __name__ == "__main__":
    main()
