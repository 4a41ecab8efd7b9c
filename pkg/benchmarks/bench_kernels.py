#!/usr/bin/env python3
"""Compare the numba and pure-numpy grouped-statistics kernels.

The grouped reduction is the hot loop of interval aggregation; this
benchmark times both implementations on synthetic workloads shaped like
real traffic (many spans, a few hundred cells).

Usage:
    python benchmarks/bench_kernels.py [--sizes 10000,100000,1000000] [--groups 300]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from heatmon.kernels import _group_stats_numba, _group_stats_numpy


def bench(func, gid, values, n_groups, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        func(gid, values, n_groups)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="10000,100000,1000000")
    parser.add_argument("--groups", type=int, default=300)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    rng = np.random.default_rng(0)
    # Warm-up: trigger JIT compilation outside the timed region.
    warm_gid = rng.integers(0, 4, 100).astype(np.int64)
    _group_stats_numba(warm_gid, rng.uniform(1, 10, 100), 4)

    print(f"{'spans':>10} {'groups':>7} {'numpy (ms)':>12} {'numba (ms)':>12} {'speedup':>8}")
    for n in sizes:
        gid = rng.integers(0, args.groups, n).astype(np.int64)
        values = rng.lognormal(5.0, 0.4, n)
        t_numpy = bench(_group_stats_numpy, gid, values, args.groups)
        t_numba = bench(_group_stats_numba, gid, values, args.groups)

        a = _group_stats_numpy(gid, values, args.groups)
        b = _group_stats_numba(gid, values, args.groups)
        for left, right in zip(a, b):
            np.testing.assert_allclose(left, right, rtol=1e-9)

        print(
            f"{n:>10} {args.groups:>7} {t_numpy * 1e3:>12.3f} "
            f"{t_numba * 1e3:>12.3f} {t_numpy / t_numba:>7.1f}x"
        )


if __name__ == "__main__":
    main()
