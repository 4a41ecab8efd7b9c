"""Ingestion pipeline: buffer spans per base interval, seal, persist.

Spans are binned by their own start time into half-open base intervals.
Sealing aggregates every buffered interval that the clock has fully
passed and appends the snapshot to the store; sealed intervals are
immutable, so spans arriving for them later are dropped and counted.
"""
from __future__ import annotations

from dataclasses import dataclass

from .aggregate import aggregate_interval
from .errors import StorageFailure
from .model import IntervalSnapshot, TraceSpan
from .store import SnapshotStore
from .zipkin import DEFAULT_INSTANCE_TAG, parse_zipkin_spans


@dataclass
class IngestSummary:
    accepted: int = 0
    skipped: int = 0
    dropped_late: int = 0


class TelemetryPipeline:
    """Single-sealer span buffer in front of a SnapshotStore."""

    def __init__(
        self,
        store: SnapshotStore,
        base_interval_ms: int = 60_000,
        instance_tag_key: str = DEFAULT_INSTANCE_TAG,
    ):
        if base_interval_ms <= 0:
            raise ValueError("base_interval_ms must be positive")
        self.store = store
        self.base_interval_ms = base_interval_ms
        self.instance_tag_key = instance_tag_key
        self.accepted_total = 0
        self.storage_healthy = True
        self._buffers: dict[int, list[TraceSpan]] = {}
        # Resuming over existing data: everything at or before the stored
        # timeline is sealed territory.
        last = store.last_start
        self._watermark: int | None = (
            last + base_interval_ms if last is not None else None
        )

    def _bin_start(self, span: TraceSpan) -> int:
        return span.start_ms - span.start_ms % self.base_interval_ms

    def ingest(self, payload: bytes | str) -> IngestSummary:
        """Parse a Zipkin span array and buffer it. MalformedPayload propagates."""
        result = parse_zipkin_spans(payload, self.instance_tag_key)
        summary = IngestSummary(skipped=result.skipped)
        for span in result.spans:
            bin_start = self._bin_start(span)
            if self._watermark is not None and bin_start < self._watermark:
                summary.dropped_late += 1
            else:
                self._buffers.setdefault(bin_start, []).append(span)
                summary.accepted += 1
        self.accepted_total += summary.accepted
        return summary

    def seal_tick(self, now_ms: int) -> IntervalSnapshot | None:
        """Seal every buffered interval that ended at or before ``now_ms``.

        Returns the most recently sealed snapshot, or None when nothing
        sealed. On StorageFailure the interval's spans stay buffered for
        retry and the failure propagates.
        """
        sealed: IntervalSnapshot | None = None
        for bin_start in sorted(self._buffers):
            if bin_start + self.base_interval_ms > now_ms:
                break
            snapshot = aggregate_interval(
                self._buffers[bin_start], bin_start, self.base_interval_ms
            )
            try:
                self.store.append(snapshot)
            except StorageFailure:
                self.storage_healthy = False
                raise
            self.storage_healthy = True
            del self._buffers[bin_start]
            self._watermark = bin_start + self.base_interval_ms
            sealed = snapshot
        return sealed

    @property
    def buffered_spans(self) -> int:
        return sum(len(spans) for spans in self._buffers.values())
