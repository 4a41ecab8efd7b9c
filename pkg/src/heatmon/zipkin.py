"""Zipkin v2 span-array parsing into the internal span representation.

The caller is read from the local endpoint, the callee from the remote
endpoint; a missing remote endpoint falls back to the span name. Per-span
defects never abort a batch: bad elements are skipped and counted.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import MalformedPayload
from .model import PLACEHOLDER, TraceSpan, normalize_return_code

#: Zipkin tag conventionally carrying the HTTP status of the call.
HTTP_STATUS_TAG = "http.status_code"
#: Default tag carrying the deployment instance (data center) identity.
DEFAULT_INSTANCE_TAG = "app.instance"


@dataclass
class ParseResult:
    spans: list[TraceSpan]
    skipped: int


def parse_zipkin_spans(
    payload: bytes | str, instance_tag_key: str = DEFAULT_INSTANCE_TAG
) -> ParseResult:
    """Parse a Zipkin v2 JSON span array.

    Raises MalformedPayload when the document is not a JSON array;
    individual unparseable elements are skipped and counted instead.
    """
    try:
        doc = json.loads(payload)
    except (ValueError, UnicodeDecodeError) as exc:
        raise MalformedPayload(f"payload is not valid JSON: {exc}") from exc
    if not isinstance(doc, list):
        raise MalformedPayload("top-level JSON document must be an array of spans")

    spans: list[TraceSpan] = []
    skipped = 0
    for element in doc:
        span = _parse_span(element, instance_tag_key)
        if span is None:
            skipped += 1
        else:
            spans.append(span)
    return ParseResult(spans=spans, skipped=skipped)


def span_to_zipkin(span: TraceSpan, instance_tag_key: str = DEFAULT_INSTANCE_TAG) -> dict:
    """Render a TraceSpan back into Zipkin v2 JSON form (parse inverse)."""
    return {
        "traceId": span.trace_id,
        "id": span.span_id,
        "kind": "CLIENT",
        "timestamp": span.start_time_us,
        "duration": span.duration_us,
        "localEndpoint": {"serviceName": span.caller_id},
        "remoteEndpoint": {"serviceName": span.callee_id},
        "tags": {
            HTTP_STATUS_TAG: span.return_code,
            instance_tag_key: span.app_instance_id,
        },
    }


def _as_epoch_int(value) -> int | None:
    # Zipkin emits integers; tolerate integer-valued floats from lax encoders.
    if isinstance(value, bool):
        return None
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    return None


def _clean_str(value) -> str | None:
    if not isinstance(value, str):
        return None
    trimmed = value.strip()
    return trimmed or None


def _parse_span(element, instance_tag_key: str) -> TraceSpan | None:
    if not isinstance(element, dict):
        return None

    trace_id = _clean_str(element.get("traceId"))
    span_id = _clean_str(element.get("id"))
    timestamp = _as_epoch_int(element.get("timestamp"))
    duration = _as_epoch_int(element.get("duration"))
    if trace_id is None or span_id is None or timestamp is None:
        return None
    if duration is None or duration < 0 or timestamp < 0:
        return None

    local = element.get("localEndpoint") or {}
    remote = element.get("remoteEndpoint") or {}
    if not isinstance(local, dict) or not isinstance(remote, dict):
        return None
    caller = _clean_str(local.get("serviceName"))
    callee = _clean_str(remote.get("serviceName")) or _clean_str(element.get("name"))
    if caller is None or callee is None:
        return None

    tags = element.get("tags") or {}
    if not isinstance(tags, dict):
        tags = {}
    return_code = normalize_return_code(tags.get(HTTP_STATUS_TAG))
    instance = _clean_str(tags.get(instance_tag_key)) or PLACEHOLDER

    return TraceSpan(
        trace_id=trace_id,
        span_id=span_id,
        start_time_us=timestamp,
        duration_us=duration,
        caller_id=caller,
        callee_id=callee,
        app_instance_id=instance,
        return_code=return_code,
    )
