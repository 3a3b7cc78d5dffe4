"""Timing comparison of the numpy and numba kernel implementations.

Run directly:

    python3 benchmarks/bench_backends.py

Each kernel is timed best-of-5 after a warmup call (the warmup also pays
the one-time JIT compile for the numba variants). Sizes are picked so the
numpy column sits in the tens of milliseconds.
"""

import time

import numpy as np

from subguard._backend import variants
from subguard.config import DEFAULT_TOLS
from subguard.kind import _surface_params

D1 = np.array([-1.5, 0.0, -1.0])
D2 = np.array([1.5, 0.0, 1.5])
XA = np.array([0.0, 0.0, 2.0])
ALPHA = 0.5


def bench(fn, args, repeats=5):
    fn(*args)  # warmup / compile
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def workloads(rng):
    grid = rng.uniform(-4.0, 4.0, size=(200_000, 2))
    defenders = np.stack([D1, D2])
    params = _surface_params(D1, D2, ALPHA, DEFAULT_TOLS)
    surf = rng.uniform(-4.0, 4.0, size=(100_000, 2))
    # straight race toward a point just off the saddle, ~47k steps to capture
    pos0 = np.stack([D1, D2, XA])
    speeds = np.array([1.0, 1.0, 0.5])
    mode = np.zeros(3, dtype=np.int64)
    vec = np.stack([np.array([-0.5, 0.0, 1.1125741132772067])] * 3)
    return [
        ("grid_pair_dists", (grid, defenders, XA)),
        ("grid_single_dists", (grid, D1, XA)),
        ("barrier_heights", (surf, *params)),
        ("run_linear", (pos0, speeds, mode, vec, 5e-5, 10.0, 1e-9, 1e-9)),
    ]


def main():
    tables = variants()
    if "numba" not in tables:
        print("numba not installed; only the numpy kernels are available")
    rng = np.random.default_rng(0)
    rows = []
    for name, args in workloads(rng):
        row = {"kernel": name}
        for backend, table in tables.items():
            row[backend] = bench(table[name], args)
        rows.append(row)

    width = max(len(r["kernel"]) for r in rows)
    header = f"{'kernel':<{width}}  {'numpy':>10}"
    if "numba" in tables:
        header += f"  {'numba':>10}  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for r in rows:
        line = f"{r['kernel']:<{width}}  {r['numpy'] * 1e3:>8.2f}ms"
        if "numba" in r:
            line += f"  {r['numba'] * 1e3:>8.2f}ms  {r['numpy'] / r['numba']:>7.1f}x"
        print(line)


if __name__ == "__main__":
    main()
