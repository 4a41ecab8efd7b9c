"""Re-bin base interval snapshots into coarser steps via compound statistics.

Statistics are pooled with merge_bundles, so a resampled bundle equals the
statistics over the raw pooled spans to floating-point precision; no raw
data is needed. Target bins with no source data are omitted, matching the
snapshot invariant that empty cells are never stored.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

from .aggregate import merge_bundles, recompute_pct
from .errors import EmptyWindow, MisalignedPlan, OverlappingSnapshots
from .model import CellMap, IntervalSnapshot, View


@dataclass(frozen=True)
class ResamplePlan:
    """Window and step pair for a resampling pass.

    The target step must be a positive multiple of the source step and the
    window edges must sit on the target grid; interpolating fractional bins
    would fabricate statistics, so misalignment is rejected instead.
    """

    source_step_ms: int
    target_step_ms: int
    window_start: int
    window_end: int

    def validate(self) -> None:
        if self.source_step_ms <= 0 or self.target_step_ms <= 0:
            raise MisalignedPlan("steps must be positive")
        if self.target_step_ms % self.source_step_ms != 0:
            raise MisalignedPlan(
                f"target step {self.target_step_ms} is not a multiple of "
                f"source step {self.source_step_ms}"
            )
        if self.window_start >= self.window_end:
            raise MisalignedPlan("window start must precede window end")
        if (
            self.window_start % self.target_step_ms != 0
            or self.window_end % self.target_step_ms != 0
        ):
            raise MisalignedPlan(
                f"window [{self.window_start}, {self.window_end}) is not "
                f"aligned to the target step {self.target_step_ms}"
            )


def resample(
    snapshots: list[IntervalSnapshot], plan: ResamplePlan
) -> list[IntervalSnapshot]:
    """Merge time-ordered source snapshots into one snapshot per target bin."""
    plan.validate()
    _check_inputs(snapshots, plan)

    bins: dict[int, list[IntervalSnapshot]] = {}
    for snap in snapshots:
        bin_index = (snap.interval_start - plan.window_start) // plan.target_step_ms
        bins.setdefault(bin_index, []).append(snap)

    out = []
    for bin_index in sorted(bins):
        start = plan.window_start + bin_index * plan.target_step_ms
        out.append(_merge_snapshots(bins[bin_index], start, plan.target_step_ms))
    return out


def window_aggregate(snapshots: list[IntervalSnapshot]) -> IntervalSnapshot:
    """Collapse disjoint snapshots into one spanning min start to max end.

    Serves as frame 0 of the heatmap animation.
    """
    if not snapshots:
        raise EmptyWindow("cannot aggregate zero snapshots")
    ordered = sorted(snapshots, key=lambda s: s.interval_start)
    for prev, cur in zip(ordered, ordered[1:]):
        if cur.interval_start < prev.interval_end:
            raise OverlappingSnapshots(
                f"snapshots at {prev.interval_start} and {cur.interval_start} overlap"
            )
    start = ordered[0].interval_start
    end = max(s.interval_end for s in ordered)
    return _merge_snapshots(ordered, start, end - start)


def _check_inputs(snapshots: list[IntervalSnapshot], plan: ResamplePlan) -> None:
    prev_start: int | None = None
    for snap in snapshots:
        if snap.interval_length_ms != plan.source_step_ms:
            raise MisalignedPlan(
                f"snapshot at {snap.interval_start} has length "
                f"{snap.interval_length_ms}, expected {plan.source_step_ms}"
            )
        if snap.interval_start < plan.window_start or snap.interval_end > plan.window_end:
            raise MisalignedPlan(
                f"snapshot at {snap.interval_start} lies outside the window"
            )
        if prev_start is not None:
            if snap.interval_start == prev_start:
                raise OverlappingSnapshots(
                    f"duplicate snapshot start {snap.interval_start}"
                )
            if snap.interval_start < prev_start:
                raise MisalignedPlan("snapshots must be time-ordered")
            if snap.interval_start < prev_start + plan.source_step_ms:
                raise OverlappingSnapshots(
                    f"snapshots at {prev_start} and {snap.interval_start} overlap"
                )
        prev_start = snap.interval_start


def _merge_snapshots(
    snapshots: list[IntervalSnapshot], start: int, length_ms: int
) -> IntervalSnapshot:
    merged = IntervalSnapshot(interval_start=start, interval_length_ms=length_ms)
    for view in View:
        target = merged.view_map(view)
        target.update(_merge_view(snapshots, view))
    return merged


def _merge_view(snapshots: list[IntervalSnapshot], view: View) -> CellMap:
    cells: CellMap = {}
    for snap in snapshots:
        for y_id, x_id, code_map in snap.cells(view):
            out_map = cells.setdefault(y_id, {}).setdefault(x_id, {})
            for code, bundle in code_map.items():
                existing = out_map.get(code)
                if existing is None:
                    # Copy so pct recomputation never mutates the source.
                    out_map[code] = replace(bundle, extras=dict(bundle.extras))
                else:
                    out_map[code] = merge_bundles(existing, bundle)
    for row in cells.values():
        for code_map in row.values():
            recompute_pct(code_map)
    return cells
