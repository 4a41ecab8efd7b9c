"""Command line entry points: serve, replay, generate, matrix.

Every flag can also come from the environment with a CHM_ prefix
(CHM_PORT, CHM_DATA_DIR, CHM_INTERVAL_MS, CHM_INSTANCE_TAG, CHM_CLOCK).
"""
from __future__ import annotations

import csv
import json
import sys
import time
from pathlib import Path

import click

from .config import ClockMode, ServiceConfig
from .errors import HeatmonError
from .heatmap import Metric, QuerySpec, ValueMode, build_frames
from .model import View
from .pipeline import TelemetryPipeline
from .store import SnapshotStore
from .synth import PRESETS, ScenarioSpec, generate_batches, write_span_file
from .zipkin import DEFAULT_INSTANCE_TAG


def _data_dir_option(func):
    return click.option(
        "--data-dir", envvar="CHM_DATA_DIR", default="data", show_default=True,
        type=click.Path(path_type=Path), help="Snapshot store root.",
    )(func)


def _interval_option(func):
    return click.option(
        "--interval-ms", envvar="CHM_INTERVAL_MS", default=60_000, show_default=True,
        type=int, help="Base aggregation interval in ms.",
    )(func)


def _instance_tag_option(func):
    return click.option(
        "--instance-tag", envvar="CHM_INSTANCE_TAG", default=DEFAULT_INSTANCE_TAG,
        show_default=True, help="Span tag carrying the app instance / data center.",
    )(func)


@click.group()
def main():
    """Heatmap monitoring for microservice trace telemetry."""


@main.command()
@click.option("--port", envvar="CHM_PORT", default=8080, show_default=True, type=int)
@_data_dir_option
@_interval_option
@_instance_tag_option
@click.option(
    "--clock", envvar="CHM_CLOCK", default="wall", show_default=True,
    type=click.Choice([mode.value for mode in ClockMode]),
    help="wall = seal by wall time; manual = advance via POST /api/v1/clock.",
)
@click.option(
    "--ui-dir", envvar="CHM_UI_DIR", default=None, type=click.Path(path_type=Path),
    help="Static dashboard build to serve under /ui (default: frontend/dist).",
)
def serve(port, data_dir, interval_ms, instance_tag, clock, ui_dir):
    """Run the ingestion + query service."""
    import uvicorn

    from .service import create_app

    config = ServiceConfig(
        listen_port=port,
        data_dir=data_dir,
        base_interval_ms=interval_ms,
        instance_tag_key=instance_tag,
        clock_mode=ClockMode(clock),
        ui_dir=ui_dir,
    )
    uvicorn.run(create_app(config), host="0.0.0.0", port=port)


@main.command()
@click.argument("span_file", type=click.Path(exists=True, path_type=Path))
@click.option(
    "--speed", default=0.0, show_default=True, type=float,
    help="Pacing multiplier; 0 replays as fast as possible.",
)
@_data_dir_option
@_interval_option
@_instance_tag_option
def replay(span_file, speed, data_dir, interval_ms, instance_tag):
    """Feed a recorded span file (one Zipkin JSON array per line) through
    ingestion under a manual clock, sealing intervals as time advances."""
    store = SnapshotStore(data_dir, interval_ms)
    pipeline = TelemetryPipeline(store, interval_ms, instance_tag)

    batches = accepted = skipped = dropped = snapshots = 0
    last_seen_ms: int | None = None
    try:
        with open(span_file, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                summary = pipeline.ingest(line)
                batches += 1
                accepted += summary.accepted
                skipped += summary.skipped
                dropped += summary.dropped_late
                spans = json.loads(line)
                if spans:
                    last_seen_ms = max(s["timestamp"] // 1000 for s in spans)
                    now = (last_seen_ms // interval_ms + 1) * interval_ms
                    if pipeline.seal_tick(now) is not None:
                        snapshots += 1
                if speed > 0:
                    time.sleep(interval_ms / 1000.0 / speed)
        if last_seen_ms is not None:
            if pipeline.seal_tick(last_seen_ms + 2 * interval_ms) is not None:
                snapshots += 1
    except HeatmonError as exc:
        raise click.ClickException(str(exc))
    click.echo(
        f"replayed {batches} batches: accepted={accepted} skipped={skipped} "
        f"dropped_late={dropped} snapshots={snapshots} data_dir={data_dir}"
    )


@main.command()
@click.option(
    "--preset", default="demo", show_default=True,
    type=click.Choice(sorted(PRESETS)), help="Bundled scenario.",
)
@click.option(
    "--config", "config_path", type=click.Path(exists=True, path_type=Path),
    default=None, help="Scenario JSON file (overrides --preset).",
)
@click.option("--hours", type=float, default=None, help="Override scenario duration.")
@click.option("--seed", type=int, default=None, help="Override scenario seed.")
@click.option(
    "--out", type=click.Path(path_type=Path), default=None,
    help="Also write the span stream to this file (one JSON array per minute).",
)
@click.option(
    "--no-store", is_flag=True, default=False,
    help="Skip aggregating into the data dir (use with --out).",
)
@_data_dir_option
@_interval_option
def generate(preset, config_path, hours, seed, out, no_store, data_dir, interval_ms):
    """Generate synthetic telemetry and aggregate it into the store."""
    try:
        if config_path is not None:
            spec = ScenarioSpec.from_json(config_path)
        else:
            spec = PRESETS[preset]()
        if hours is not None or seed is not None:
            doc = spec.to_dict()
            if hours is not None:
                doc["duration_ms"] = int(hours * 3_600_000)
                for fault in doc["faults"]:
                    fault["start_ms"] = min(fault["start_ms"], doc["duration_ms"])
                    fault["end_ms"] = min(fault["end_ms"], doc["duration_ms"])
                doc["faults"] = [
                    f for f in doc["faults"] if f["start_ms"] < f["end_ms"]
                ]
            if seed is not None:
                doc["seed"] = seed
            spec = ScenarioSpec.from_dict(doc)

        if out is not None:
            total = write_span_file(spec, out)
            click.echo(f"wrote {total} spans to {out}")
        if not no_store:
            store = SnapshotStore(data_dir, interval_ms)
            pipeline = TelemetryPipeline(store, interval_ms)
            total = 0
            for minute_start, batch in generate_batches(spec):
                if batch:
                    summary = pipeline.ingest(json.dumps(batch))
                    total += summary.accepted
                pipeline.seal_tick(minute_start + interval_ms)
            pipeline.seal_tick(spec.start_ms + spec.duration_ms + interval_ms)
            click.echo(
                f"aggregated {total} spans into {data_dir} "
                f"({spec.duration_ms // 60000} minutes, seed {spec.seed})"
            )
    except HeatmonError as exc:
        raise click.ClickException(str(exc))


@main.command()
@click.option(
    "--view", default=View.DATACENTER_SERVICES.value, show_default=True,
    type=click.Choice([view.value for view in View]),
)
@click.option(
    "--metric", default=Metric.CALL_VOLUME.value, show_default=True,
    type=click.Choice([metric.value for metric in Metric]),
)
@click.option("--codes", default=None, help="Comma-separated return codes.")
@click.option(
    "--mode", default=ValueMode.ABSOLUTE.value, show_default=True,
    type=click.Choice([mode.value for mode in ValueMode]),
)
@click.option("--lo", type=float, default=None, help="Inclusive value-range floor.")
@click.option("--hi", type=float, default=None, help="Inclusive value-range ceiling.")
@click.option("--from", "from_ms", type=int, required=True, help="Window start, epoch ms.")
@click.option("--to", "to_ms", type=int, required=True, help="Window end, epoch ms.")
@click.option("--step", "step_ms", type=int, default=None, help="Frame step ms [default: window length].")
@click.option("--frame", default=0, show_default=True, type=int, help="Frame to print (0 = whole-window aggregate).")
@_data_dir_option
@_interval_option
def matrix(view, metric, codes, mode, lo, hi, from_ms, to_ms, step_ms, frame, data_dir, interval_ms):
    """One-shot heatmap query printed as CSV."""
    code_filter = None
    if codes:
        code_filter = frozenset(c.strip() for c in codes.split(",") if c.strip())
    if step_ms is None:
        step_ms = to_ms - from_ms
    value_range = (lo, hi) if lo is not None or hi is not None else None
    try:
        store = SnapshotStore(data_dir, interval_ms)
        spec = QuerySpec(
            view=View(view),
            metric=Metric(metric),
            from_ms=from_ms,
            to_ms=to_ms,
            step_ms=step_ms,
            code_filter=code_filter,
            value_mode=ValueMode(mode),
            value_range=value_range,
        )
        frame_set = build_frames(spec, store)
    except HeatmonError as exc:
        raise click.ClickException(str(exc))
    if not frame_set.frames:
        raise click.ClickException("no data in the requested window")
    if not 0 <= frame < len(frame_set.frames):
        raise click.ClickException(
            f"frame {frame} out of range (0..{len(frame_set.frames) - 1})"
        )
    grid = frame_set.frames[frame]
    writer = csv.writer(sys.stdout)
    writer.writerow([""] + grid.x_labels)
    for y_id, row in zip(grid.y_labels, grid.values):
        writer.writerow([y_id] + ["" if v is None else f"{v:.6g}" for v in row])


if __name__ == "__main__":
    main()
