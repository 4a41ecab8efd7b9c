"""Shared fixtures and independent oracles used across the suite.

The oracles here deliberately avoid the library's aggregation code paths:
statistics are recomputed with plain Python arithmetic over raw duration
lists so the tests stay meaningful if the kernels change.
"""
from __future__ import annotations

import math
import random

import pytest

from heatmon.model import IntervalSnapshot, StatsBundle, TraceSpan, View


def brute_force_stats(durations_ms: list[float]) -> dict:
    """Population statistics straight from the raw values."""
    n = len(durations_ms)
    mean = sum(durations_ms) / n
    var = sum((d - mean) ** 2 for d in durations_ms) / n
    return {
        "count": n,
        "mean_ms": mean,
        "min_ms": min(durations_ms),
        "max_ms": max(durations_ms),
        "std_ms": math.sqrt(var),
    }


def durations_by_cell(
    spans: list[TraceSpan], view: View
) -> dict[tuple[str, str, str], list[float]]:
    """Raw duration lists keyed by (y, x, return_code) for one view."""
    cells: dict[tuple[str, str, str], list[float]] = {}
    for span in spans:
        if view is View.DATACENTER_SERVICES:
            key = (span.app_instance_id, span.callee_id, span.return_code)
        else:
            key = (span.caller_id, span.callee_id, span.return_code)
        cells.setdefault(key, []).append(span.duration_us / 1000.0)
    return cells


def make_span(
    start_ms: int,
    duration_us: int = 1000,
    caller: str = "web-gateway",
    callee: str = "orders-api",
    dc: str = "dc-east",
    code: str = "200",
    tag: int = 0,
) -> TraceSpan:
    return TraceSpan(
        trace_id=f"{tag:032x}",
        span_id=f"{tag:016x}",
        start_time_us=start_ms * 1000,
        duration_us=duration_us,
        caller_id=caller,
        callee_id=callee,
        app_instance_id=dc,
        return_code=code,
    )


def random_spans(
    rng: random.Random,
    n: int,
    interval_start: int,
    interval_length_ms: int,
    dcs: list[str] | None = None,
    callers: list[str] | None = None,
    callees: list[str] | None = None,
    codes: list[str] | None = None,
) -> list[TraceSpan]:
    dcs = dcs or ["dc-east", "dc-west", "dc-south"]
    callers = callers or ["web-gateway", "mobile-gateway", "dashboard-broker"]
    callees = callees or ["orders-api", "cloudant", "preferences", "catalog-api"]
    codes = codes or ["200", "429", "500", "-1", "unknown"]
    spans = []
    for i in range(n):
        spans.append(
            TraceSpan(
                trace_id=f"{rng.getrandbits(128):032x}",
                span_id=f"{rng.getrandbits(64):016x}",
                start_time_us=(interval_start + rng.randrange(interval_length_ms)) * 1000
                + rng.randrange(1000),
                duration_us=rng.randrange(100, 10_000_000),
                caller_id=rng.choice(callers),
                callee_id=rng.choice(callees),
                app_instance_id=rng.choice(dcs),
                return_code=rng.choice(codes),
            )
        )
    return spans


def assert_bundle_matches(
    bundle: StatsBundle, expected: dict, rel: float = 1e-9, note: str = ""
) -> None:
    assert bundle.count == expected["count"], note
    assert bundle.min_ms == expected["min_ms"], note
    assert bundle.max_ms == expected["max_ms"], note
    assert math.isclose(bundle.mean_ms, expected["mean_ms"], rel_tol=rel), note
    assert math.isclose(
        bundle.std_ms, expected["std_ms"], rel_tol=rel, abs_tol=1e-12
    ), note


def assert_snapshots_equal(
    a: IntervalSnapshot,
    b: IntervalSnapshot,
    rel: float = 0.0,
    abs_tol: float = 0.0,
) -> None:
    """Fieldwise snapshot comparison; zero tolerances mean exact equality."""
    assert a.interval_start == b.interval_start
    assert a.interval_length_ms == b.interval_length_ms
    for view in View:
        map_a, map_b = a.view_map(view), b.view_map(view)
        assert set(map_a) == set(map_b), view
        for y_id in map_a:
            assert set(map_a[y_id]) == set(map_b[y_id]), (view, y_id)
            for x_id in map_a[y_id]:
                codes_a, codes_b = map_a[y_id][x_id], map_b[y_id][x_id]
                assert set(codes_a) == set(codes_b), (view, y_id, x_id)
                for code in codes_a:
                    _assert_bundles_equal(
                        codes_a[code], codes_b[code], rel, abs_tol,
                        (view, y_id, x_id, code),
                    )


def _assert_bundles_equal(a: StatsBundle, b: StatsBundle, rel, abs_tol, where) -> None:
    assert a.count == b.count, where
    for name in ("mean_ms", "min_ms", "max_ms", "std_ms", "pct"):
        va, vb = getattr(a, name), getattr(b, name)
        if va is None or vb is None:
            assert va == vb, (where, name)
        else:
            assert math.isclose(va, vb, rel_tol=rel, abs_tol=abs_tol), (where, name, va, vb)
    assert set(a.extras) == set(b.extras), where
    for name, va in a.extras.items():
        assert math.isclose(va, b.extras[name], rel_tol=rel, abs_tol=abs_tol), (where, name)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0xC0FFEE)
