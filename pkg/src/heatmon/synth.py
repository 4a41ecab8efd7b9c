"""Deterministic synthetic telemetry: Zipkin span batches with fault injection.

A scenario is a static topology (instances per data center, caller->callee
edges with a base call rate and a log-normal latency profile) plus a list
of faults that override return codes, latency, or traffic inside a time
range. Per-edge call counts are Poisson per minute and per hosting data
center. Every random draw comes from a stream keyed by
(seed, minute, edge, data center), so output is byte-stable for a fixed
spec and disjoint time ranges can be generated independently.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import InvalidScenario
from .zipkin import DEFAULT_INSTANCE_TAG, HTTP_STATUS_TAG

MINUTE_MS = 60_000


class FaultKind(str, Enum):
    RATE_LIMIT_429 = "rate_limit_429"
    SERVER_ERROR_5XX = "server_error_5xx"
    LATENCY_DEGRADE = "latency_degrade"
    NON_HTTP_CODE = "non_http_code"
    LOW_TRAFFIC = "low_traffic"


#: Return code injected per fault kind (probability = fault magnitude).
FAULT_CODES = {
    FaultKind.RATE_LIMIT_429: "429",
    FaultKind.SERVER_ERROR_5XX: "500",
    FaultKind.NON_HTTP_CODE: "-1",
}


@dataclass(frozen=True)
class Edge:
    caller: str
    callee: str
    rate_per_min: float  # expected calls per minute, per hosting data center
    median_ms: float
    sigma: float  # log-normal shape; 0 = deterministic latency


@dataclass(frozen=True)
class Fault:
    """One behavioural override, active on [start_ms, end_ms) scenario time.

    Targets either every edge into a service (``service=``) or one exact
    edge (``caller=``/``callee=``). Magnitude semantics per kind:
    probability of the injected code for the code faults, replacement
    median latency in ms for LATENCY_DEGRADE, and a rate multiplier for
    LOW_TRAFFIC.
    """

    kind: FaultKind
    magnitude: float
    start_ms: int
    end_ms: int
    service: str | None = None
    caller: str | None = None
    callee: str | None = None

    def matches(self, edge: Edge) -> bool:
        if self.service is not None:
            return edge.callee == self.service
        return edge.caller == self.caller and edge.callee == self.callee


@dataclass
class ScenarioSpec:
    seed: int
    duration_ms: int
    instances: list[tuple[str, str]]  # (data_center, microservice)
    edges: list[Edge]
    faults: list[Fault] = field(default_factory=list)
    start_ms: int = 0  # epoch anchor of scenario time zero

    def validate(self) -> None:
        if self.seed < 0:
            raise InvalidScenario("seed must be non-negative")
        if self.duration_ms <= 0:
            raise InvalidScenario("duration_ms must be positive")
        if self.start_ms < 0:
            raise InvalidScenario("start_ms must be non-negative")
        if not self.instances:
            raise InvalidScenario("topology needs at least one instance")
        for dc, service in self.instances:
            if not dc or not service:
                raise InvalidScenario("instance entries need data center and service")
        hosts = hosting_dcs(self)
        if not self.edges:
            raise InvalidScenario("topology needs at least one edge")
        for edge in self.edges:
            if edge.rate_per_min <= 0:
                raise InvalidScenario(f"edge {edge.caller}->{edge.callee}: rate must be > 0")
            if edge.median_ms <= 0 or edge.sigma < 0:
                raise InvalidScenario(
                    f"edge {edge.caller}->{edge.callee}: bad latency distribution"
                )
            if edge.callee not in hosts:
                raise InvalidScenario(
                    f"edge callee {edge.callee} is hosted in no data center"
                )
        for fault in self.faults:
            self._validate_fault(fault)

    def _validate_fault(self, fault: Fault) -> None:
        tag = fault.kind.value
        if (fault.service is None) == (fault.caller is None or fault.callee is None):
            raise InvalidScenario(
                f"fault {tag}: target either a service or one caller/callee edge"
            )
        if not 0 <= fault.start_ms < fault.end_ms <= self.duration_ms:
            raise InvalidScenario(f"fault {tag}: range outside scenario duration")
        if fault.kind in FAULT_CODES and not 0 < fault.magnitude <= 1:
            raise InvalidScenario(f"fault {tag}: magnitude must be a probability")
        if fault.kind is FaultKind.LATENCY_DEGRADE and fault.magnitude <= 0:
            raise InvalidScenario(f"fault {tag}: magnitude is a median in ms, > 0")
        if fault.kind is FaultKind.LOW_TRAFFIC and not 0 <= fault.magnitude <= 1:
            raise InvalidScenario(f"fault {tag}: magnitude must be a rate multiplier")
        if not any(fault.matches(edge) for edge in self.edges):
            raise InvalidScenario(f"fault {tag}: matches no edge in the topology")

    # -- declarative JSON form ------------------------------------------------

    @classmethod
    def from_dict(cls, doc: dict) -> "ScenarioSpec":
        try:
            spec = cls(
                seed=int(doc["seed"]),
                duration_ms=int(doc["duration_ms"]),
                start_ms=int(doc.get("start_ms", 0)),
                instances=[(str(dc), str(svc)) for dc, svc in doc["instances"]],
                edges=[
                    Edge(
                        caller=str(e["caller"]),
                        callee=str(e["callee"]),
                        rate_per_min=float(e["rate_per_min"]),
                        median_ms=float(e["median_ms"]),
                        sigma=float(e.get("sigma", 0.3)),
                    )
                    for e in doc["edges"]
                ],
                faults=[
                    Fault(
                        kind=FaultKind(f["kind"]),
                        magnitude=float(f["magnitude"]),
                        start_ms=int(f["start_ms"]),
                        end_ms=int(f["end_ms"]),
                        service=f.get("service"),
                        caller=f.get("caller"),
                        callee=f.get("callee"),
                    )
                    for f in doc.get("faults", [])
                ],
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidScenario(f"bad scenario document: {exc}") from exc
        spec.validate()
        return spec

    @classmethod
    def from_json(cls, path: str | Path) -> "ScenarioSpec":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "duration_ms": self.duration_ms,
            "start_ms": self.start_ms,
            "instances": [list(pair) for pair in self.instances],
            "edges": [
                {
                    "caller": e.caller,
                    "callee": e.callee,
                    "rate_per_min": e.rate_per_min,
                    "median_ms": e.median_ms,
                    "sigma": e.sigma,
                }
                for e in self.edges
            ],
            "faults": [
                {
                    "kind": f.kind.value,
                    "magnitude": f.magnitude,
                    "start_ms": f.start_ms,
                    "end_ms": f.end_ms,
                    **({"service": f.service} if f.service is not None else {}),
                    **({"caller": f.caller} if f.caller is not None else {}),
                    **({"callee": f.callee} if f.callee is not None else {}),
                }
                for f in self.faults
            ],
        }


def hosting_dcs(spec: ScenarioSpec) -> dict[str, list[str]]:
    """Data centers hosting each microservice, sorted for stable iteration."""
    hosts: dict[str, set[str]] = {}
    for dc, service in spec.instances:
        hosts.setdefault(service, set()).add(dc)
    return {service: sorted(dcs) for service, dcs in hosts.items()}


def _overlap_fraction(fault: Fault, minute_start: int) -> float:
    lo = max(fault.start_ms, minute_start)
    hi = min(fault.end_ms, minute_start + MINUTE_MS)
    return max(0, hi - lo) / MINUTE_MS


def generate_batches(spec: ScenarioSpec) -> Iterator[tuple[int, list[dict]]]:
    """Yield (epoch_minute_start_ms, zipkin span dicts) per scenario minute."""
    spec.validate()
    hosts = hosting_dcs(spec)
    minutes = math.ceil(spec.duration_ms / MINUTE_MS)
    for minute in range(minutes):
        rel_start = minute * MINUTE_MS
        batch: list[dict] = []
        for edge_index, edge in enumerate(spec.edges):
            for dc_index, dc in enumerate(hosts[edge.callee]):
                rng = np.random.default_rng(
                    [spec.seed, minute, edge_index, dc_index]
                )
                batch.extend(
                    _edge_minute_spans(rng, spec, edge, dc, rel_start)
                )
        yield spec.start_ms + rel_start, batch


def _edge_minute_spans(
    rng: np.random.Generator,
    spec: ScenarioSpec,
    edge: Edge,
    dc: str,
    rel_start: int,
) -> list[dict]:
    active = [f for f in spec.faults if f.matches(edge)]

    lam = edge.rate_per_min
    for fault in active:
        if fault.kind is FaultKind.LOW_TRAFFIC:
            frac = _overlap_fraction(fault, rel_start)
            lam *= (1.0 - frac) + frac * fault.magnitude
    n = int(rng.poisson(lam))
    if n == 0:
        return []

    offsets_us = np.sort(rng.integers(0, MINUTE_MS * 1000, size=n))
    rel_ms = rel_start + offsets_us // 1000

    medians = np.full(n, edge.median_ms)
    for fault in active:
        if fault.kind is FaultKind.LATENCY_DEGRADE:
            mask = (rel_ms >= fault.start_ms) & (rel_ms < fault.end_ms)
            medians[mask] = fault.magnitude
    factors = rng.lognormal(0.0, edge.sigma, size=n) if edge.sigma > 0 else np.ones(n)
    durations_us = np.maximum(1, np.rint(medians * factors * 1000)).astype(np.int64)

    codes = np.full(n, "200", dtype=object)
    undecided = np.ones(n, dtype=bool)
    for fault in active:
        injected = FAULT_CODES.get(fault.kind)
        if injected is None:
            continue
        in_range = (rel_ms >= fault.start_ms) & (rel_ms < fault.end_ms)
        hit = undecided & in_range & (rng.random(n) < fault.magnitude)
        codes[hit] = injected
        undecided &= ~hit

    ids = rng.integers(0, 2**64, size=(n, 3), dtype=np.uint64)
    base_us = (spec.start_ms + rel_start) * 1000

    spans = []
    for i in range(n):
        spans.append(
            {
                "traceId": f"{ids[i, 0]:016x}{ids[i, 1]:016x}",
                "id": f"{ids[i, 2]:016x}",
                "name": f"get /{edge.callee}",
                "kind": "CLIENT",
                "timestamp": int(base_us + offsets_us[i]),
                "duration": int(durations_us[i]),
                "localEndpoint": {"serviceName": edge.caller},
                "remoteEndpoint": {"serviceName": edge.callee},
                "tags": {
                    HTTP_STATUS_TAG: str(codes[i]),
                    DEFAULT_INSTANCE_TAG: dc,
                },
            }
        )
    return spans


def write_span_file(spec: ScenarioSpec, path: str | Path) -> int:
    """Write one Zipkin JSON array per line, one line per scenario minute."""
    total = 0
    with open(path, "w", encoding="utf-8") as fh:
        for _, batch in generate_batches(spec):
            fh.write(json.dumps(batch, separators=(",", ":")))
            fh.write("\n")
            total += len(batch)
    return total


# --------------------------------------------------------------------------
# bundled scenario presets

_THREE_DCS = ["dc-east", "dc-south", "dc-west"]


def _all_dcs(services: list[str]) -> list[tuple[str, str]]:
    return [(dc, svc) for svc in services for dc in _THREE_DCS]


def rate_limit_scenario(duration_ms: int = 2 * 3_600_000, seed: int = 31) -> ScenarioSpec:
    """One service answering 429 on ~40% of its calls, in every data center."""
    services = ["web-gateway", "mobile-gateway", "orders-api", "catalog-api"]
    return ScenarioSpec(
        seed=seed,
        duration_ms=duration_ms,
        instances=_all_dcs(services),
        edges=[
            Edge("web-gateway", "orders-api", 400.0, 120.0, 0.3),
            Edge("mobile-gateway", "orders-api", 400.0, 130.0, 0.3),
            Edge("web-gateway", "catalog-api", 50.0, 80.0, 0.3),
        ],
        faults=[
            Fault(
                kind=FaultKind.RATE_LIMIT_429,
                magnitude=0.4,
                start_ms=0,
                end_ms=duration_ms,
                service="orders-api",
            )
        ],
    )


def dead_service_scenario(duration_ms: int = 30 * MINUTE_MS, seed: int = 32) -> ScenarioSpec:
    """A service answering nothing but server errors."""
    services = ["web-gateway", "legacy-reports", "catalog-api"]
    return ScenarioSpec(
        seed=seed,
        duration_ms=duration_ms,
        instances=_all_dcs(services),
        edges=[
            Edge("web-gateway", "legacy-reports", 40.0, 180.0, 0.3),
            Edge("web-gateway", "catalog-api", 60.0, 80.0, 0.3),
        ],
        faults=[
            Fault(
                kind=FaultKind.SERVER_ERROR_5XX,
                magnitude=1.0,
                start_ms=0,
                end_ms=duration_ms,
                service="legacy-reports",
            )
        ],
    )


def slow_db_scenario(duration_ms: int = 30 * MINUTE_MS, seed: int = 33) -> ScenarioSpec:
    """A database edge degraded to a 2.5 s median response time."""
    services = ["web-gateway", "dashboard-broker", "preferences", "cloudant"]
    return ScenarioSpec(
        seed=seed,
        duration_ms=duration_ms,
        instances=_all_dcs(services),
        edges=[
            Edge("web-gateway", "dashboard-broker", 60.0, 300.0, 0.3),
            Edge("dashboard-broker", "preferences", 45.0, 60.0, 0.3),
            Edge("dashboard-broker", "cloudant", 60.0, 90.0, 0.25),
            Edge("preferences", "cloudant", 30.0, 85.0, 0.25),
        ],
        faults=[
            Fault(
                kind=FaultKind.LATENCY_DEGRADE,
                magnitude=2500.0,
                start_ms=0,
                end_ms=duration_ms,
                caller="dashboard-broker",
                callee="cloudant",
            )
        ],
    )


def non_http_scenario(duration_ms: int = 30 * MINUTE_MS, seed: int = 34) -> ScenarioSpec:
    """A custom-protocol backend answering the non-HTTP code -1."""
    services = ["orders-api", "catalog-api", "datalayer"]
    return ScenarioSpec(
        seed=seed,
        duration_ms=duration_ms,
        instances=_all_dcs(services),
        edges=[
            Edge("orders-api", "datalayer", 50.0, 75.0, 0.3),
            Edge("catalog-api", "datalayer", 30.0, 80.0, 0.3),
            Edge("orders-api", "catalog-api", 40.0, 70.0, 0.3),
        ],
        faults=[
            Fault(
                kind=FaultKind.NON_HTTP_CODE,
                magnitude=1.0,
                start_ms=0,
                end_ms=duration_ms,
                service="datalayer",
            )
        ],
    )


def low_traffic_scenario(duration_ms: int = 2 * 3_600_000, seed: int = 35) -> ScenarioSpec:
    """An infrequently used service, visible as a faint call-volume column."""
    services = ["web-gateway", "orders-api", "archived-exports"]
    return ScenarioSpec(
        seed=seed,
        duration_ms=duration_ms,
        instances=_all_dcs(services),
        edges=[
            Edge("web-gateway", "orders-api", 200.0, 110.0, 0.3),
            Edge("web-gateway", "archived-exports", 2.0, 240.0, 0.3),
        ],
        faults=[
            Fault(
                kind=FaultKind.LOW_TRAFFIC,
                magnitude=0.25,
                start_ms=0,
                end_ms=duration_ms,
                service="archived-exports",
            )
        ],
    )


def demo_scenario(duration_ms: int = 24 * 3_600_000, seed: int = 11) -> ScenarioSpec:
    """Bundled day-long dataset: 3 data centers, 12 services, all fault kinds."""
    services = [
        "web-gateway", "mobile-gateway", "auth-service", "orders-api",
        "catalog-api", "search-api", "dashboard-broker", "preferences",
        "cloudant", "datalayer", "billing-api", "legacy-reports",
    ]
    hour = 3_600_000

    def clip(t: int) -> int:
        return min(t, duration_ms)

    faults = [
        Fault(FaultKind.RATE_LIMIT_429, 0.4, 0, clip(3 * hour), service="orders-api"),
        Fault(FaultKind.SERVER_ERROR_5XX, 1.0, 0, duration_ms, service="legacy-reports"),
        Fault(
            FaultKind.LATENCY_DEGRADE, 2500.0,
            clip(hour), clip(4 * hour),
            caller="dashboard-broker", callee="cloudant",
        ),
        Fault(FaultKind.NON_HTTP_CODE, 1.0, 0, duration_ms, service="datalayer"),
        Fault(FaultKind.LOW_TRAFFIC, 0.2, 0, duration_ms, service="legacy-reports"),
    ]
    faults = [f for f in faults if f.start_ms < f.end_ms]
    return ScenarioSpec(
        seed=seed,
        duration_ms=duration_ms,
        instances=_all_dcs(services),
        edges=[
            Edge("web-gateway", "auth-service", 30.0, 45.0, 0.3),
            Edge("web-gateway", "orders-api", 22.0, 140.0, 0.3),
            Edge("mobile-gateway", "orders-api", 15.0, 150.0, 0.3),
            Edge("web-gateway", "catalog-api", 20.0, 70.0, 0.3),
            Edge("web-gateway", "search-api", 10.0, 110.0, 0.35),
            Edge("web-gateway", "dashboard-broker", 18.0, 180.0, 0.3),
            Edge("dashboard-broker", "cloudant", 12.0, 90.0, 0.25),
            Edge("dashboard-broker", "preferences", 11.0, 60.0, 0.3),
            Edge("preferences", "cloudant", 8.0, 85.0, 0.25),
            Edge("datalayer", "cloudant", 9.0, 95.0, 0.25),
            Edge("orders-api", "billing-api", 6.0, 120.0, 0.3),
            Edge("orders-api", "datalayer", 10.0, 75.0, 0.3),
            Edge("catalog-api", "datalayer", 8.0, 80.0, 0.3),
            Edge("web-gateway", "legacy-reports", 1.5, 200.0, 0.3),
        ],
        faults=faults,
    )


PRESETS = {
    "demo": demo_scenario,
    "rate-limit": rate_limit_scenario,
    "dead-service": dead_service_scenario,
    "slow-db": slow_db_scenario,
    "non-http": non_http_scenario,
    "low-traffic": low_traffic_scenario,
}
