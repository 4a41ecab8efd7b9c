import json

import pytest
from fastapi.testclient import TestClient

from conftest import random_spans
from heatmon.config import ClockMode, ServiceConfig
from heatmon.heatmap import Metric, QuerySpec, ValueMode, build_frames
from heatmon.model import View
from heatmon.service import create_app, frame_set_payload
from heatmon.store import SnapshotStore
from heatmon.zipkin import span_to_zipkin

MINUTE = 60_000


@pytest.fixture
def client(tmp_path):
    config = ServiceConfig(data_dir=tmp_path / "data", clock_mode=ClockMode.MANUAL)
    app = create_app(config)
    with TestClient(app) as client:
        yield client


def post_spans(client, spans):
    return client.post(
        "/api/v1/spans", content=json.dumps([span_to_zipkin(s) for s in spans])
    )


def advance(client, now_ms):
    response = client.post("/api/v1/clock", json={"now_ms": now_ms})
    assert response.status_code == 200
    return response.json()


def seed_minutes(client, rng, minutes, per_minute=30):
    spans = []
    for m in range(minutes):
        batch = random_spans(rng, per_minute, m * MINUTE, MINUTE)
        spans.extend(batch)
        assert post_spans(client, batch).json()["accepted"] == per_minute
        advance(client, (m + 1) * MINUTE)
    return spans


def test_ingest_happy_path(client, rng):
    response = post_spans(client, random_spans(rng, 100, 0, MINUTE))
    assert response.status_code == 200
    assert response.json() == {"accepted": 100, "skipped": 0, "dropped_late": 0}


def test_ingest_empty_array(client):
    response = client.post("/api/v1/spans", content=b"[]")
    assert response.status_code == 200
    assert response.json() == {"accepted": 0, "skipped": 0, "dropped_late": 0}


def test_ingest_counts_invalid_spans(client, rng):
    docs = [span_to_zipkin(s) for s in random_spans(rng, 10, 0, MINUTE)]
    broken = [dict(d) for d in docs[:2]]
    for d in broken:
        del d["timestamp"]
    response = client.post("/api/v1/spans", content=json.dumps(docs + broken))
    body = response.json()
    assert body["accepted"] == 10
    assert body["skipped"] == 2


def test_ingest_malformed_payload_is_400(client):
    response = client.post("/api/v1/spans", content=b'{"a": 1}')
    assert response.status_code == 400
    assert "array" in response.json()["detail"]


def test_clock_seals_and_heatmap_serves(client, rng):
    seed_minutes(client, rng, 3)
    response = client.get(
        "/api/v1/heatmap",
        params={
            "view": "datacenter_services", "metric": "call_volume",
            "from": 0, "to": 3 * MINUTE, "step": MINUTE,
        },
    )
    assert response.status_code == 200
    body = response.json()
    assert body["spec"]["view"] == "datacenter_services"
    assert len(body["frames"]) == 4
    assert body["frames"][0]["aggregate"] is True
    assert all(not f["aggregate"] for f in body["frames"][1:])


def test_heatmap_endpoint_matches_direct_build(client, rng, tmp_path):
    seed_minutes(client, rng, 4)
    response = client.get(
        "/api/v1/heatmap",
        params={
            "view": "caller_callee", "metric": "mean_rt",
            "from": 0, "to": 4 * MINUTE, "step": 2 * MINUTE,
        },
    )
    store = SnapshotStore(tmp_path / "data")
    spec = QuerySpec(
        view=View.CALLER_CALLEE, metric=Metric.MEAN_RT,
        from_ms=0, to_ms=4 * MINUTE, step_ms=2 * MINUTE,
    )
    expected = frame_set_payload(build_frames(spec, store))
    assert response.json() == json.loads(json.dumps(expected))


def test_heatmap_percent_without_codes_is_400(client):
    response = client.get(
        "/api/v1/heatmap",
        params={
            "view": "datacenter_services", "metric": "call_volume",
            "mode": "percent", "from": 0, "to": MINUTE, "step": MINUTE,
        },
    )
    assert response.status_code == 400
    assert "percent" in response.json()["detail"]


def test_heatmap_inverted_window_is_400(client):
    response = client.get(
        "/api/v1/heatmap",
        params={
            "view": "datacenter_services", "metric": "call_volume",
            "from": MINUTE, "to": MINUTE, "step": MINUTE,
        },
    )
    assert response.status_code == 400


def test_heatmap_unknown_enum_is_400(client):
    response = client.get(
        "/api/v1/heatmap",
        params={
            "view": "sideways", "metric": "call_volume",
            "from": 0, "to": MINUTE, "step": MINUTE,
        },
    )
    assert response.status_code == 400
    assert "view" in response.json()["detail"]


def test_heatmap_empty_window_is_200_with_no_frames(client):
    response = client.get(
        "/api/v1/heatmap",
        params={
            "view": "datacenter_services", "metric": "call_volume",
            "from": 0, "to": MINUTE, "step": MINUTE,
        },
    )
    assert response.status_code == 200
    assert response.json()["frames"] == []


def test_catalog_reports_observed_labels(client, rng):
    spans = seed_minutes(client, rng, 2)
    response = client.get("/api/v1/catalog", params={"from": 0, "to": 2 * MINUTE})
    body = response.json()
    assert body["data_centers"] == sorted({s.app_instance_id for s in spans})
    assert body["microservices"] == sorted({s.callee_id for s in spans})
    assert body["callers"] == sorted({s.caller_id for s in spans})
    assert body["callees"] == sorted({s.callee_id for s in spans})
    assert body["return_codes"] == sorted({s.return_code for s in spans})
    assert "-1" in body["return_codes"]


def test_catalog_empty_window(client):
    response = client.get("/api/v1/catalog", params={"from": 0, "to": MINUTE})
    assert response.json() == {
        "data_centers": [], "microservices": [], "callers": [],
        "callees": [], "return_codes": [],
    }


def test_catalog_bad_window_is_400(client):
    response = client.get("/api/v1/catalog", params={"from": MINUTE, "to": 0})
    assert response.status_code == 400


def test_range_endpoint_tracks_store(client, rng):
    assert client.get("/api/v1/range").json()["first_ts"] is None
    seed_minutes(client, rng, 2)
    body = client.get("/api/v1/range").json()
    assert body["first_ts"] == 0
    assert body["last_ts"] == MINUTE
    assert body["base_interval_ms"] == MINUTE


def test_clock_endpoint_rejected_in_wall_mode(tmp_path):
    config = ServiceConfig(data_dir=tmp_path / "data", clock_mode=ClockMode.WALL)
    with TestClient(create_app(config)) as client:
        response = client.post("/api/v1/clock", json={"now_ms": 0})
        assert response.status_code == 400


def test_no_span_counted_twice(client, rng):
    spans = seed_minutes(client, rng, 5)
    response = client.get(
        "/api/v1/heatmap",
        params={
            "view": "caller_callee", "metric": "call_volume",
            "from": 0, "to": 5 * MINUTE, "step": 5 * MINUTE,
        },
    )
    frame0 = response.json()["frames"][0]
    total = sum(v for row in frame0["values"] for v in row if v is not None)
    assert total == len(spans)
