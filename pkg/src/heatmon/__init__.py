"""Heatmap-based health monitoring for microservice trace telemetry."""

from .aggregate import aggregate_interval, merge_bundles, merge_many
from .errors import (
    EmptyWindow,
    HeatmonError,
    InvalidScenario,
    InvalidSpec,
    MalformedPayload,
    MisalignedPlan,
    OutOfBinSpan,
    OutOfOrderAppend,
    OverlappingSnapshots,
    SchemaViolation,
    StorageFailure,
)
from .heatmap import (
    CellLookup,
    HeatmapFrame,
    HeatmapFrameSet,
    Metric,
    QuerySpec,
    ValueMode,
    build_frames,
    cell_lookup,
)
from .model import (
    CellKey,
    IntervalSnapshot,
    StatsBundle,
    TraceSpan,
    View,
    normalize_return_code,
)
from .resample import ResamplePlan, resample, window_aggregate
from .store import SnapshotStore, parse_snapshot, serialize_snapshot, serialize_snapshots
from .zipkin import ParseResult, parse_zipkin_spans, span_to_zipkin

__version__ = "0.1.0"

__all__ = [
    "CellKey",
    "CellLookup",
    "EmptyWindow",
    "HeatmapFrame",
    "HeatmapFrameSet",
    "HeatmonError",
    "IntervalSnapshot",
    "InvalidScenario",
    "InvalidSpec",
    "MalformedPayload",
    "Metric",
    "MisalignedPlan",
    "OutOfBinSpan",
    "OutOfOrderAppend",
    "OverlappingSnapshots",
    "ParseResult",
    "QuerySpec",
    "ResamplePlan",
    "SchemaViolation",
    "SnapshotStore",
    "StatsBundle",
    "StorageFailure",
    "TraceSpan",
    "ValueMode",
    "View",
    "aggregate_interval",
    "build_frames",
    "cell_lookup",
    "merge_bundles",
    "merge_many",
    "normalize_return_code",
    "parse_snapshot",
    "parse_zipkin_spans",
    "resample",
    "serialize_snapshot",
    "serialize_snapshots",
    "span_to_zipkin",
    "window_aggregate",
]
