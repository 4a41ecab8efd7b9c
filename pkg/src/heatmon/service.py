"""HTTP surface: span intake, clock control, heatmap and catalog queries.

The app wraps one TelemetryPipeline + SnapshotStore pair. Under the wall
clock a background task seals elapsed intervals; under the manual clock
(tests, replay) time only moves via POST /api/v1/clock.
"""
from __future__ import annotations

import asyncio
import contextlib
import time
from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse, RedirectResponse
from fastapi.staticfiles import StaticFiles

from .config import ClockMode, ServiceConfig
from .errors import (
    InvalidSpec,
    MalformedPayload,
    MisalignedPlan,
    OverlappingSnapshots,
    StorageFailure,
)
from .heatmap import HeatmapFrameSet, Metric, QuerySpec, ValueMode, build_frames
from .model import View
from .pipeline import TelemetryPipeline
from .store import SnapshotStore


def frame_set_payload(frame_set: HeatmapFrameSet) -> dict:
    """JSON shape of a heatmap response."""
    spec = frame_set.spec
    return {
        "spec": {
            "view": spec.view.value,
            "metric": spec.metric.value,
            "codes": sorted(spec.code_filter) if spec.code_filter else None,
            "mode": spec.value_mode.value,
            "lo": spec.value_range[0] if spec.value_range else None,
            "hi": spec.value_range[1] if spec.value_range else None,
            "from": spec.from_ms,
            "to": spec.to_ms,
            "step": spec.step_ms,
        },
        "frames": [
            {
                "start": frame.frame_start,
                "end": frame.frame_end,
                "aggregate": frame.is_aggregate,
                "x": frame.x_labels,
                "y": frame.y_labels,
                "values": frame.values,
            }
            for frame in frame_set.frames
        ],
    }


def _parse_query_spec(
    view: str, metric: str, codes: str | None, mode: str,
    lo: float | None, hi: float | None,
    from_ms: int, to_ms: int, step_ms: int,
) -> QuerySpec:
    try:
        parsed_view = View(view)
    except ValueError:
        raise InvalidSpec(f"view: unknown value {view!r}")
    try:
        parsed_metric = Metric(metric)
    except ValueError:
        raise InvalidSpec(f"metric: unknown value {metric!r}")
    try:
        parsed_mode = ValueMode(mode)
    except ValueError:
        raise InvalidSpec(f"mode: unknown value {mode!r}")
    code_filter = None
    if codes is not None:
        code_filter = frozenset(c.strip() for c in codes.split(",") if c.strip())
        if not code_filter:
            raise InvalidSpec("codes: must name at least one return code")
    value_range = (lo, hi) if lo is not None or hi is not None else None
    spec = QuerySpec(
        view=parsed_view,
        metric=parsed_metric,
        from_ms=from_ms,
        to_ms=to_ms,
        step_ms=step_ms,
        code_filter=code_filter,
        value_mode=parsed_mode,
        value_range=value_range,
    )
    spec.validate()
    return spec


def create_app(config: ServiceConfig) -> FastAPI:
    config.validate()
    store = SnapshotStore(config.data_dir, config.base_interval_ms)
    pipeline = TelemetryPipeline(
        store, config.base_interval_ms, config.instance_tag_key
    )

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        sealer: asyncio.Task | None = None
        if config.clock_mode is ClockMode.WALL:
            sealer = asyncio.create_task(_wall_sealer(pipeline, config))
        yield
        if sealer is not None:
            sealer.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await sealer

    app = FastAPI(title="heatmon", lifespan=lifespan)
    app.state.pipeline = pipeline
    app.state.store = store
    app.state.config = config

    @app.post("/api/v1/spans")
    async def ingest_spans(request: Request):
        if not pipeline.storage_healthy:
            return JSONResponse({"detail": "storage is failing"}, status_code=503)
        body = await request.body()
        try:
            summary = pipeline.ingest(body)
        except MalformedPayload as exc:
            return JSONResponse({"detail": str(exc)}, status_code=400)
        return {
            "accepted": summary.accepted,
            "skipped": summary.skipped,
            "dropped_late": summary.dropped_late,
        }

    @app.post("/api/v1/clock")
    async def advance_clock(request: Request):
        if config.clock_mode is not ClockMode.MANUAL:
            return JSONResponse(
                {"detail": "clock endpoint requires manual clock mode"},
                status_code=400,
            )
        body = await request.json()
        now_ms = body.get("now_ms") if isinstance(body, dict) else None
        if not isinstance(now_ms, int):
            return JSONResponse(
                {"detail": "body must carry integer now_ms"}, status_code=400
            )
        try:
            sealed = pipeline.seal_tick(now_ms)
        except StorageFailure as exc:
            return JSONResponse({"detail": str(exc)}, status_code=503)
        return {
            "now_ms": now_ms,
            "sealed_interval_start": sealed.interval_start if sealed else None,
        }

    @app.get("/api/v1/heatmap")
    async def heatmap(
        view: str,
        metric: str,
        from_ms: int = Query(alias="from"),
        to_ms: int = Query(alias="to"),
        step: int = Query(),
        codes: str | None = None,
        mode: str = "absolute",
        lo: float | None = None,
        hi: float | None = None,
    ):
        try:
            spec = _parse_query_spec(
                view, metric, codes, mode, lo, hi, from_ms, to_ms, step
            )
            frame_set = build_frames(spec, store)
        except (InvalidSpec, MisalignedPlan, OverlappingSnapshots) as exc:
            return JSONResponse({"detail": str(exc)}, status_code=400)
        except StorageFailure as exc:
            return JSONResponse({"detail": str(exc)}, status_code=503)
        return frame_set_payload(frame_set)

    @app.get("/api/v1/catalog")
    async def catalog(
        from_ms: int = Query(alias="from"), to_ms: int = Query(alias="to")
    ):
        if from_ms >= to_ms:
            return JSONResponse(
                {"detail": "window: from must precede to"}, status_code=400
            )
        try:
            snapshots = store.load_window(from_ms, to_ms)
        except StorageFailure as exc:
            return JSONResponse({"detail": str(exc)}, status_code=503)
        data_centers: set[str] = set()
        microservices: set[str] = set()
        callers: set[str] = set()
        callees: set[str] = set()
        return_codes: set[str] = set()
        for snap in snapshots:
            for y_id, x_id, code_map in snap.cells(View.DATACENTER_SERVICES):
                data_centers.add(y_id)
                microservices.add(x_id)
                return_codes.update(code_map)
            for y_id, x_id, code_map in snap.cells(View.CALLER_CALLEE):
                callers.add(y_id)
                callees.add(x_id)
                return_codes.update(code_map)
        return {
            "data_centers": sorted(data_centers),
            "microservices": sorted(microservices),
            "callers": sorted(callers),
            "callees": sorted(callees),
            "return_codes": sorted(return_codes),
        }

    @app.get("/api/v1/range")
    async def data_range():
        # UI bootstrap helper: where on the timeline the store has data.
        return {
            "first_ts": store.first_start,
            "last_ts": store.last_start,
            "base_interval_ms": store.interval_length_ms,
        }

    ui_dir = _resolve_ui_dir(config)
    if ui_dir is not None:
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

        @app.get("/", include_in_schema=False)
        async def index():
            return RedirectResponse(url="/ui/")

    return app


def _resolve_ui_dir(config: ServiceConfig) -> Path | None:
    if config.ui_dir is not None:
        path = Path(config.ui_dir)
        return path if path.is_dir() else None
    default = Path("frontend") / "dist"
    return default if default.is_dir() else None


async def _wall_sealer(pipeline: TelemetryPipeline, config: ServiceConfig) -> None:
    period_s = min(5.0, max(0.25, config.base_interval_ms / 4000))
    while True:
        await asyncio.sleep(period_s)
        with contextlib.suppress(StorageFailure):
            pipeline.seal_tick(int(time.time() * 1000))


__all__ = ["create_app", "frame_set_payload"]
