"""Grouped reduction kernels behind interval aggregation.

Folding spans into per-(cell, code) statistics is the one hot numeric loop
in the pipeline, so it is JIT-compiled with numba when available. Setting
``CHM_PURE_NUMPY=1`` (or running without numba) selects a pure-numpy path
that computes identical statistics; ``benchmarks/bench_kernels.py``
compares the two.

Both paths are two-pass (mean first, then squared deviations) so the
population standard deviation matches a direct two-pass oracle to within
a few ulps even when the variance is tiny relative to the mean.
"""
from __future__ import annotations

import os

import numpy as np


def _env_flag(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() in {"1", "true", "yes", "on"}


PURE_NUMPY = _env_flag("CHM_PURE_NUMPY")

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    HAVE_NUMBA = False

    def njit(*args, **kwargs):  # type: ignore[misc]
        def wrap(func):
            return func

        return wrap


#: Active path; tests monkeypatch this to pin one implementation.
USE_NUMBA = HAVE_NUMBA and not PURE_NUMPY


@njit(cache=True)
def _group_stats_numba(group_ids, values, n_groups):  # pragma: no cover - jitted
    counts = np.zeros(n_groups, dtype=np.int64)
    sums = np.zeros(n_groups, dtype=np.float64)
    mins = np.full(n_groups, np.inf)
    maxs = np.full(n_groups, -np.inf)
    n = values.shape[0]
    for i in range(n):
        g = group_ids[i]
        v = values[i]
        counts[g] += 1
        sums[g] += v
        if v < mins[g]:
            mins[g] = v
        if v > maxs[g]:
            maxs[g] = v
    means = np.zeros(n_groups, dtype=np.float64)
    for g in range(n_groups):
        if counts[g] > 0:
            means[g] = sums[g] / counts[g]
    m2 = np.zeros(n_groups, dtype=np.float64)
    for i in range(n):
        g = group_ids[i]
        d = values[i] - means[g]
        m2[g] += d * d
    stds = np.zeros(n_groups, dtype=np.float64)
    for g in range(n_groups):
        if counts[g] > 0:
            stds[g] = np.sqrt(m2[g] / counts[g])
    return counts, means, mins, maxs, stds


def _group_stats_numpy(group_ids, values, n_groups):
    counts = np.bincount(group_ids, minlength=n_groups)
    sums = np.bincount(group_ids, weights=values, minlength=n_groups)
    means = np.divide(sums, counts, out=np.zeros(n_groups), where=counts > 0)
    dev = values - means[group_ids]
    m2 = np.bincount(group_ids, weights=dev * dev, minlength=n_groups)
    stds = np.sqrt(np.divide(m2, counts, out=np.zeros(n_groups), where=counts > 0))
    mins = np.full(n_groups, np.inf)
    np.minimum.at(mins, group_ids, values)
    maxs = np.full(n_groups, -np.inf)
    np.maximum.at(maxs, group_ids, values)
    return counts.astype(np.int64), means, mins, maxs, stds


def group_stats(
    group_ids: np.ndarray, values: np.ndarray, n_groups: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Per-group count, mean, min, max and population std.

    ``group_ids`` assigns each value to a group in ``[0, n_groups)``.
    Groups with no members report count 0 and zeroed statistics (min/max
    stay at +/-inf); callers that only materialize observed groups never
    see them.
    """
    group_ids = np.ascontiguousarray(group_ids, dtype=np.int64)
    values = np.ascontiguousarray(values, dtype=np.float64)
    if group_ids.shape != values.shape:
        raise ValueError("group_ids and values must have matching shapes")
    if USE_NUMBA:
        return _group_stats_numba(group_ids, values, n_groups)
    return _group_stats_numpy(group_ids, values, n_groups)
