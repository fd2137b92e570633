#!/usr/bin/env python3
"""Benchmark the compiled kernel backend against the numpy fallback.

Times the Jacobi eigensolver, Cholesky, LU, and the triangular solve with a
matrix right-hand side on random Hermitian/generic inputs, and prints a
speedup table.

Usage: python benchmarks/bench_kernels.py [--sizes 60,120,240] [--repeats 3]
"""

import argparse
import time

import numpy as np

from oqeig import _kernels_py

try:
    from oqeig import _kernels_cy
except ImportError:
    _kernels_cy = None


def _timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(n, repeats, rng):
    h = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = (h + h.conj().T) / 2
    spd = h @ h.conj().T + n * np.eye(n)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    low = np.tril(rng.standard_normal((n, n))) + 3 * np.eye(n)
    rhs = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    cases = [
        ("jacobi_eigh", lambda k: k.jacobi_eigh(h)),
        ("cholesky", lambda k: k.cholesky(spd)),
        ("lu_factor", lambda k: k.lu_factor(g)),
        ("tri_solve(matrix rhs)",
         lambda k: k.solve_triangular(low, rhs, lower=True)),
    ]
    rows = []
    for name, fn in cases:
        t_py = _timeit(lambda: fn(_kernels_py), repeats)
        if _kernels_cy is not None:
            t_cy = _timeit(lambda: fn(_kernels_cy), repeats)
            rows.append((name, n, t_py, t_cy, t_py / t_cy))
        else:
            rows.append((name, n, t_py, float("nan"), float("nan")))
    return rows


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--sizes", default="60,120,240")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(0)
    if _kernels_cy is None:
        print("compiled backend not built; timing the numpy fallback only")
    print("%-24s %6s %12s %12s %9s"
          % ("kernel", "n", "python [s]", "cython [s]", "speedup"))
    for n in sizes:
        for name, size, t_py, t_cy, speedup in bench(n, args.repeats, rng):
            print("%-24s %6d %12.4f %12.4f %8.1fx"
                  % (name, size, t_py, t_cy, speedup))


if __name__ == "__main__":
    main()
