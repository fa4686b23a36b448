#!/usr/bin/env python3
"""Benchmark the numba-compiled kernels against the pure-numpy fallbacks.

Run: python3 benchmarks/bench_kernels.py [--repeats N]
The same comparison can be forced end-to-end with XCSER_NUMBA=0.
"""

import argparse
import time

import numpy as np

from xcser import kernels


def timeit(fn, repeats):
    fn()  # warm-up (JIT compilation for the numba variants)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_match(repeats, n=2000, d=6, calls=200):
    rng = np.random.default_rng(0)
    a = rng.uniform(0, 1, (n, d))
    b = rng.uniform(0, 1, (n, d))
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    states = rng.uniform(0, 1, (calls, d))

    def run(fn):
        def body():
            for s in states:
                fn(lo, hi, s)
        return body

    rows = [("match_mask numpy", timeit(run(kernels.match_mask_numpy), repeats))]
    if kernels.NUMBA_AVAILABLE:
        rows.append(("match_mask numba",
                     timeit(run(kernels.match_mask_numba), repeats)))
    return rows, calls


def bench_scalar_update(repeats, n=2000, set_size=40, calls=200):
    rng = np.random.default_rng(1)

    def fresh():
        return (rng.uniform(0, 1000, n), rng.uniform(0, 50, n),
                rng.uniform(0.01, 1, n), rng.uniform(1, 30, n),
                rng.integers(0, 100, n), rng.integers(1, 5, n))

    rows_idx = [np.sort(rng.choice(n, set_size, replace=False)).astype(np.int64)
                for _ in range(calls)]

    def run(fn):
        state = fresh()

        def body():
            for rows in rows_idx:
                fn(*state, rows, 750.0, 0.2, 0.1, 10.0, 5.0)
        return body

    out = [("scalar_update numpy",
            timeit(run(kernels.update_scalar_set_numpy), repeats))]
    if kernels.NUMBA_AVAILABLE:
        out.append(("scalar_update numba",
                    timeit(run(kernels.update_scalar_set_numba), repeats)))
    return out, calls


def bench_linear_update(repeats, n=2000, d=4, set_size=30, calls=100):
    rng = np.random.default_rng(2)

    def fresh():
        return (rng.uniform(-1, 1, (n, d + 1)),
                np.tile(np.eye(d + 1) * 10.0, (n, 1, 1)),
                rng.uniform(0, 5, n), rng.uniform(0.01, 1, n),
                rng.uniform(1, 10, n), rng.integers(0, 50, n),
                rng.integers(1, 4, n))

    rows_idx = [np.sort(rng.choice(n, set_size, replace=False)).astype(np.int64)
                for _ in range(calls)]
    x = np.concatenate(([1.0], rng.uniform(0, 1, d)))

    def run(fn):
        state = fresh()

        def body():
            for rows in rows_idx:
                fn(*state, rows, x, 3.5, 0.1, 0.1, 1.0, 5.0, 1.0, 10.0)
        return body

    out = [("linear_update numpy",
            timeit(run(kernels.update_linear_set_numpy), repeats))]
    if kernels.NUMBA_AVAILABLE:
        out.append(("linear_update numba",
                    timeit(run(kernels.update_linear_set_numba), repeats)))
    return out, calls


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    print(f"numba available: {kernels.NUMBA_AVAILABLE} "
          f"(active backend: {kernels.BACKEND})")
    print(f"{'kernel':<24} {'best total':>12} {'per call':>12} {'speedup':>9}")
    for rows, calls in (bench_match(args.repeats),
                        bench_scalar_update(args.repeats),
                        bench_linear_update(args.repeats)):
        base = rows[0][1]
        for name, best in rows:
            speed = f"{base / best:6.1f}x" if best else "-"
            print(f"{name:<24} {best * 1e3:9.2f} ms {best / calls * 1e6:9.2f} us"
                  f" {speed:>9}")


if __name__ == "__main__":
    main()
