"""ETL core: fold raw spans from one time bin into an IntervalSnapshot.

A snapshot holds, for both heatmap views, one StatsBundle per
(cell, return-code) pair: call count, mean/min/max/population-std of the
duration in milliseconds, and the code's share of the cell's calls.
Population (divide-by-N) standard deviation keeps bundles exactly
composable under :func:`merge_bundles`.
"""
from __future__ import annotations

import math
from functools import reduce

import numpy as np

from .errors import OutOfBinSpan
from .kernels import group_stats
from .model import CellMap, IntervalSnapshot, StatsBundle, TraceSpan, View


def aggregate_interval(
    spans: list[TraceSpan], interval_start: int, interval_length_ms: int
) -> IntervalSnapshot:
    """Aggregate spans whose start lies in the half-open bin.

    Raises OutOfBinSpan if any span starts outside
    ``[interval_start, interval_start + interval_length_ms)`` — that is a
    caller bug, not data noise.
    """
    if interval_length_ms <= 0:
        raise ValueError("interval_length_ms must be positive")
    interval_end = interval_start + interval_length_ms
    for span in spans:
        if not interval_start <= span.start_ms < interval_end:
            raise OutOfBinSpan(
                f"span {span.span_id} starts at {span.start_ms} ms, outside "
                f"[{interval_start}, {interval_end})"
            )

    snapshot = IntervalSnapshot(
        interval_start=interval_start, interval_length_ms=interval_length_ms
    )
    if not spans:
        return snapshot

    durations_ms = np.array([s.duration_us for s in spans], dtype=np.float64)
    durations_ms /= 1000.0

    snapshot.datacenter_services.update(
        _view_cells(spans, durations_ms, View.DATACENTER_SERVICES)
    )
    snapshot.caller_callee_pairs.update(
        _view_cells(spans, durations_ms, View.CALLER_CALLEE)
    )
    return snapshot


def _span_key(span: TraceSpan, view: View) -> tuple[str, str, str]:
    if view is View.DATACENTER_SERVICES:
        # The data-center view attributes a span to the serving (callee) side.
        return span.app_instance_id, span.callee_id, span.return_code
    return span.caller_id, span.callee_id, span.return_code


def _view_cells(
    spans: list[TraceSpan], durations_ms: np.ndarray, view: View
) -> CellMap:
    index: dict[tuple[str, str, str], int] = {}
    group_ids = np.empty(len(spans), dtype=np.int64)
    for i, span in enumerate(spans):
        key = _span_key(span, view)
        group_ids[i] = index.setdefault(key, len(index))

    counts, means, mins, maxs, stds = group_stats(group_ids, durations_ms, len(index))

    cells: CellMap = {}
    for (y_id, x_id, code), g in index.items():
        bundle = StatsBundle(
            count=int(counts[g]),
            mean_ms=float(means[g]),
            min_ms=float(mins[g]),
            max_ms=float(maxs[g]),
            std_ms=float(stds[g]),
        )
        cells.setdefault(y_id, {}).setdefault(x_id, {})[code] = bundle
    for row in cells.values():
        for code_map in row.values():
            recompute_pct(code_map)
    return cells


def recompute_pct(code_map: dict[str, StatsBundle]) -> None:
    """Set each code's pct to its share of the cell's total call count."""
    total = sum(bundle.count for bundle in code_map.values())
    for bundle in code_map.values():
        bundle.pct = 100.0 * bundle.count / total


def merge_bundles(a: StatsBundle, b: StatsBundle) -> StatsBundle:
    """Pool two bundles without the raw data (compound mean/std).

    Commutative and associative up to floating-point rounding. The pct
    field is ignored on input and left unset: it only makes sense relative
    to a cell total, which the caller recomputes. Extra statistics from
    foreign files carry no merge semantics and are dropped.
    """
    if a.count < 1 or b.count < 1:
        raise ValueError("merge_bundles requires count >= 1 on both sides")
    if a.mean_ms is None or b.mean_ms is None or a.std_ms is None or b.std_ms is None:
        raise ValueError("merge_bundles requires duration statistics on both sides")
    n = a.count + b.count
    mean = (a.count * a.mean_ms + b.count * b.mean_ms) / n
    variance = (
        a.count * (a.std_ms**2 + (a.mean_ms - mean) ** 2)
        + b.count * (b.std_ms**2 + (b.mean_ms - mean) ** 2)
    ) / n
    return StatsBundle(
        count=n,
        mean_ms=mean,
        min_ms=min(a.min_ms, b.min_ms),  # type: ignore[type-var]
        max_ms=max(a.max_ms, b.max_ms),  # type: ignore[type-var]
        std_ms=math.sqrt(variance),
    )


def merge_many(bundles: list[StatsBundle]) -> StatsBundle:
    """Left-fold merge_bundles; a single bundle is returned unchanged."""
    if not bundles:
        raise ValueError("merge_many requires at least one bundle")
    return reduce(merge_bundles, bundles)
