import math
import subprocess
import sys

import numpy as np
import pytest

from heatmon import kernels
from conftest import brute_force_stats


def _random_case(seed, n, groups):
    rng = np.random.default_rng(seed)
    gid = rng.integers(0, groups, n)
    values = rng.uniform(0.001, 1e6, n)
    # Ensure every group id occurs so the oracle has no empty groups.
    gid[:groups] = np.arange(groups)
    return gid.astype(np.int64), values


@pytest.mark.parametrize("seed,n,groups", [(1, 50, 3), (2, 1000, 17), (3, 20000, 111)])
def test_both_paths_match_brute_force(seed, n, groups):
    gid, values = _random_case(seed, n, groups)
    for impl in (kernels._group_stats_numpy, kernels._group_stats_numba):
        counts, means, mins, maxs, stds = impl(gid, values, groups)
        for g in range(groups):
            raw = values[gid == g].tolist()
            expected = brute_force_stats(raw)
            assert counts[g] == expected["count"]
            assert mins[g] == expected["min_ms"]
            assert maxs[g] == expected["max_ms"]
            assert math.isclose(means[g], expected["mean_ms"], rel_tol=1e-12)
            assert math.isclose(stds[g], expected["std_ms"], rel_tol=1e-9, abs_tol=1e-12)


def test_paths_agree_with_each_other():
    gid, values = _random_case(7, 5000, 23)
    a = kernels._group_stats_numpy(gid, values, 23)
    b = kernels._group_stats_numba(gid, values, 23)
    for left, right in zip(a, b):
        np.testing.assert_allclose(left, right, rtol=1e-12)


def test_dispatch_honors_use_numba_switch(monkeypatch):
    gid, values = _random_case(9, 100, 4)
    monkeypatch.setattr(kernels, "USE_NUMBA", False)
    numpy_result = kernels.group_stats(gid, values, 4)
    monkeypatch.setattr(kernels, "USE_NUMBA", True)
    numba_result = kernels.group_stats(gid, values, 4)
    for left, right in zip(numpy_result, numba_result):
        np.testing.assert_allclose(left, right, rtol=1e-12)


def test_env_flag_selects_pure_numpy_path():
    code = (
        "import os; os.environ['CHM_PURE_NUMPY'] = '1'; "
        "from heatmon import kernels; "
        "assert kernels.PURE_NUMPY and not kernels.USE_NUMBA"
    )
    subprocess.run([sys.executable, "-c", code], check=True)


def test_single_group_degenerate_values():
    gid = np.zeros(1, dtype=np.int64)
    values = np.array([42.5])
    counts, means, mins, maxs, stds = kernels.group_stats(gid, values, 1)
    assert counts[0] == 1
    assert means[0] == mins[0] == maxs[0] == 42.5
    assert stds[0] == 0.0


def test_shape_mismatch_rejected():
    with pytest.raises(ValueError):
        kernels.group_stats(np.zeros(3, dtype=np.int64), np.zeros(2), 1)
