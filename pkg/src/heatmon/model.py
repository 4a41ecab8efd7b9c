"""Core domain types: spans, per-code statistics, and interval snapshots."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator

#: Substituted when a span carries no usable return code or instance tag.
PLACEHOLDER = "unknown"


class View(str, Enum):
    """The two heatmap orientations served by the tool."""

    DATACENTER_SERVICES = "datacenter_services"
    CALLER_CALLEE = "caller_callee"


def normalize_return_code(raw: str | None) -> str:
    """Trim a raw return code, falling back to the placeholder.

    Codes are opaque strings: HTTP statuses ("200", "429") and custom codes
    such as "-1" pass through unchanged.
    """
    if raw is None:
        return PLACEHOLDER
    trimmed = str(raw).strip()
    return trimmed if trimmed else PLACEHOLDER


@dataclass(frozen=True)
class TraceSpan:
    """One caller->callee request observation extracted from a trace.

    ``app_instance_id`` names the deployment instance serving the call; in
    a multi-region deployment it is typically the hosting data center.
    """

    trace_id: str
    span_id: str
    start_time_us: int  # Unix epoch microseconds
    duration_us: int
    caller_id: str
    callee_id: str
    app_instance_id: str
    return_code: str

    @property
    def start_ms(self) -> int:
        return self.start_time_us // 1000

    @property
    def duration_ms(self) -> float:
        return self.duration_us / 1000.0


@dataclass
class StatsBundle:
    """Named statistics for one (cell, return-code) pair.

    Duration statistics are in milliseconds and present only when
    ``count >= 1``; a zero-count bundle never fabricates zeros. ``pct`` is
    this code's share of the cell's calls across all codes. ``extras``
    holds statistic names from foreign snapshot files that this code base
    does not compute itself (kept for forward compatibility).
    """

    count: int = 0
    mean_ms: float | None = None
    min_ms: float | None = None
    max_ms: float | None = None
    std_ms: float | None = None
    pct: float | None = None
    extras: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class CellKey:
    """Addresses one heatmap tile; the view fixes the axis semantics.

    DATACENTER_SERVICES: y is the app instance (data center), x the serving
    microservice. CALLER_CALLEE: y is the caller, x the callee.
    """

    view: View
    y_id: str
    x_id: str


# y_id -> x_id -> return_code -> StatsBundle
CellMap = dict[str, dict[str, dict[str, StatsBundle]]]


@dataclass
class IntervalSnapshot:
    """All per-cell, per-return-code aggregates for one time bin.

    The bin is half-open: spans with ``interval_start <= start_ms <
    interval_start + interval_length_ms`` contribute. Empty cells are
    absent, never stored with zero counts.
    """

    interval_start: int  # Unix epoch milliseconds
    interval_length_ms: int
    datacenter_services: CellMap = field(default_factory=dict)
    caller_callee_pairs: CellMap = field(default_factory=dict)

    @property
    def interval_end(self) -> int:
        return self.interval_start + self.interval_length_ms

    def view_map(self, view: View) -> CellMap:
        if view is View.DATACENTER_SERVICES:
            return self.datacenter_services
        return self.caller_callee_pairs

    def cells(self, view: View) -> Iterator[tuple[str, str, dict[str, StatsBundle]]]:
        """Yield (y_id, x_id, code->bundle) for every populated cell."""
        for y_id, row in self.view_map(view).items():
            for x_id, codes in row.items():
                yield y_id, x_id, codes
