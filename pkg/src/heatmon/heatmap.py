"""Turn stored snapshots plus a query spec into labeled heatmap matrices.

A response is an ordered list of frames: frame 0 aggregates the whole
window, frames 1..n follow the resampled time bins. All frames share one
lexicographically sorted label set (the union over the window) so the
matrix dimensions stay stable during animation. Color mapping is a UI
concern; this module serves raw values, with ``None`` marking cells that
have no data or were masked out by the value range.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .aggregate import merge_many
from .errors import InvalidSpec
from .model import IntervalSnapshot, StatsBundle, View
from .resample import ResamplePlan, resample, window_aggregate


class Metric(str, Enum):
    CALL_VOLUME = "call_volume"
    MEAN_RT = "mean_rt"
    MIN_RT = "min_rt"
    MAX_RT = "max_rt"
    STD_RT = "std_rt"


class ValueMode(str, Enum):
    ABSOLUTE = "absolute"
    PERCENT = "percent"


@dataclass(frozen=True)
class QuerySpec:
    """One heatmap request.

    ``code_filter`` of None means all return codes combined. PERCENT mode
    reads the filtered share of a cell's call volume, so it requires
    CALL_VOLUME and a non-empty filter. ``value_range`` bounds are
    inclusive and each side may be open (None).
    """

    view: View
    metric: Metric
    from_ms: int
    to_ms: int
    step_ms: int
    code_filter: frozenset[str] | None = None
    value_mode: ValueMode = ValueMode.ABSOLUTE
    value_range: tuple[float | None, float | None] | None = None

    def validate(self) -> None:
        if self.from_ms >= self.to_ms:
            raise InvalidSpec("window: from must precede to")
        if self.step_ms <= 0:
            raise InvalidSpec("step_ms: must be positive")
        if self.code_filter is not None and not self.code_filter:
            raise InvalidSpec("code_filter: must name at least one code when present")
        if self.value_mode is ValueMode.PERCENT:
            if self.metric is not Metric.CALL_VOLUME:
                raise InvalidSpec("value_mode: percent applies to call_volume only")
            if not self.code_filter:
                raise InvalidSpec("value_mode: percent requires a code filter")
        if self.value_range is not None:
            lo, hi = self.value_range
            if lo is not None and hi is not None and lo > hi:
                raise InvalidSpec("value_range: lo must not exceed hi")


@dataclass
class HeatmapFrame:
    """One labeled |y| x |x| matrix for a time slice."""

    x_labels: list[str]
    y_labels: list[str]
    values: list[list[float | None]]
    frame_start: int
    frame_end: int
    is_aggregate: bool


@dataclass
class HeatmapFrameSet:
    """Ordered frames; frame 0 (when present) aggregates the whole window."""

    frames: list[HeatmapFrame]
    spec: QuerySpec


@dataclass(frozen=True)
class CellLookup:
    """Tooltip payload: the addressed coordinates and their value."""

    x_id: str
    y_id: str
    value: float | None


def build_frames(spec: QuerySpec, store) -> HeatmapFrameSet:
    """Execute a query against a snapshot source.

    ``store`` provides ``load_window(from_ms, to_ms)`` and the base
    ``interval_length_ms`` the stored snapshots were aggregated at. An
    empty window yields an empty frame set, not an error.
    """
    spec.validate()
    snapshots = store.load_window(spec.from_ms, spec.to_ms)
    if not snapshots:
        return HeatmapFrameSet(frames=[], spec=spec)

    plan = ResamplePlan(
        source_step_ms=store.interval_length_ms,
        target_step_ms=spec.step_ms,
        window_start=spec.from_ms,
        window_end=spec.to_ms,
    )
    stepped = resample(snapshots, plan)
    aggregate = window_aggregate(stepped)

    y_labels: set[str] = set()
    x_labels: set[str] = set()
    for snap in stepped:
        for y_id, row in snap.view_map(spec.view).items():
            y_labels.add(y_id)
            x_labels.update(row)
    ys = sorted(y_labels)
    xs = sorted(x_labels)

    frames = [
        _snapshot_frame(aggregate, ys, xs, spec, spec.from_ms, spec.to_ms, True)
    ]
    frames.extend(
        _snapshot_frame(
            snap, ys, xs, spec, snap.interval_start, snap.interval_end, False
        )
        for snap in stepped
    )
    return HeatmapFrameSet(frames=frames, spec=spec)


def cell_lookup(frame: HeatmapFrame, x_id: str, y_id: str) -> CellLookup | None:
    """Value and coordinate echo for one tile; None when a label is unknown."""
    try:
        xi = frame.x_labels.index(x_id)
        yi = frame.y_labels.index(y_id)
    except ValueError:
        return None
    return CellLookup(x_id=x_id, y_id=y_id, value=frame.values[yi][xi])


def _snapshot_frame(
    snapshot: IntervalSnapshot,
    ys: list[str],
    xs: list[str],
    spec: QuerySpec,
    start: int,
    end: int,
    is_aggregate: bool,
) -> HeatmapFrame:
    view_map = snapshot.view_map(spec.view)
    values: list[list[float | None]] = []
    for y_id in ys:
        row = view_map.get(y_id, {})
        values.append([_cell_value(row.get(x_id), spec) for x_id in xs])
    return HeatmapFrame(
        x_labels=xs,
        y_labels=ys,
        values=values,
        frame_start=start,
        frame_end=end,
        is_aggregate=is_aggregate,
    )


def _cell_value(
    code_map: dict[str, StatsBundle] | None, spec: QuerySpec
) -> float | None:
    if not code_map:
        return None
    if spec.code_filter is None:
        selected = list(code_map.values())
    else:
        selected = [b for code, b in code_map.items() if code in spec.code_filter]

    if spec.metric is Metric.CALL_VOLUME:
        count = sum(b.count for b in selected)
        if spec.value_mode is ValueMode.PERCENT:
            total = sum(b.count for b in code_map.values())
            value: float | None = 100.0 * count / total
        else:
            value = float(count)
    else:
        if not selected:
            return None
        merged = merge_many(selected)
        value = {
            Metric.MEAN_RT: merged.mean_ms,
            Metric.MIN_RT: merged.min_ms,
            Metric.MAX_RT: merged.max_ms,
            Metric.STD_RT: merged.std_ms,
        }[spec.metric]

    if value is not None and spec.value_range is not None:
        lo, hi = spec.value_range
        if lo is not None and value < lo:
            return None
        if hi is not None and value > hi:
            return None
    return value
