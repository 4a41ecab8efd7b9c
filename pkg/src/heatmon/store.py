"""Snapshot persistence: nested JSON files with a 1 MiB rotation cap.

File format: one UTF-8 JSON object per file, keyed by the decimal Unix
millisecond timestamp of each contained snapshot. Each timestamp maps to a
one-element array holding the ``datacenter_services`` and
``caller_callee_pairs`` cell maps::

    {"1700000000000": [{
        "datacenter_services":  {y: {x: {code: {stat: value, ...}}}},
        "caller_callee_pairs":  {y: {x: {code: {stat: value, ...}}}}}]}

Keys at every level are sorted lexicographically and float values are
rounded at 9 fractional digits, so serialization is canonical:
serialize -> parse -> serialize is byte-identical. Statistic names other
than the canonical six are preserved on parse so foreign producers can add
their own metrics.
"""
from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import OutOfOrderAppend, SchemaViolation, StorageFailure
from .model import CellMap, IntervalSnapshot, StatsBundle

log = logging.getLogger(__name__)

MAX_FILE_BYTES = 1_048_576  # 1 MiB rotation cap

_CANONICAL_FLOATS = ("mean_ms", "min_ms", "max_ms", "std_ms", "pct")
_TS_KEY = re.compile(r"^\d+$")


@dataclass(frozen=True)
class SnapshotFile:
    """One sealed or open store file and the snapshot range it covers."""

    path: Path
    first_ts: int
    last_ts: int
    byte_size: int


# --------------------------------------------------------------------------
# serialization


def _round9(value: float) -> float:
    return round(float(value), 9)


def _bundle_to_json(bundle: StatsBundle) -> dict:
    obj: dict[str, float | int] = {}
    if bundle.count >= 1:
        obj["count"] = int(bundle.count)
    for name in _CANONICAL_FLOATS:
        value = getattr(bundle, name)
        if value is not None:
            obj[name] = _round9(value)
    for name, value in bundle.extras.items():
        obj[name] = _round9(value)
    return obj


def _cell_map_to_json(cells: CellMap) -> dict:
    return {
        y_id: {
            x_id: {code: _bundle_to_json(b) for code, b in code_map.items()}
            for x_id, code_map in row.items()
        }
        for y_id, row in cells.items()
    }


def _snapshot_body(snapshot: IntervalSnapshot) -> list[dict]:
    return [
        {
            "datacenter_services": _cell_map_to_json(snapshot.datacenter_services),
            "caller_callee_pairs": _cell_map_to_json(snapshot.caller_callee_pairs),
        }
    ]


def serialize_snapshots(snapshots: list[IntervalSnapshot]) -> str:
    """Canonical JSON for one store file (one or more timestamp keys)."""
    doc = {str(s.interval_start): _snapshot_body(s) for s in snapshots}
    return json.dumps(
        doc, sort_keys=True, ensure_ascii=False, allow_nan=False,
        separators=(",", ":"),
    )


def serialize_snapshot(snapshot: IntervalSnapshot) -> str:
    """Canonical JSON for a single snapshot."""
    return serialize_snapshots([snapshot])


# --------------------------------------------------------------------------
# parsing


def _require_dict(node, path: str) -> dict:
    if not isinstance(node, dict):
        raise SchemaViolation(path, "expected a JSON object")
    return node


def _parse_stat_value(name: str, value, path: str) -> float | int:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaViolation(path, "statistic values must be numbers")
    if name == "count":
        if isinstance(value, float):
            if not value.is_integer():
                raise SchemaViolation(path, "count must be an integer")
            value = int(value)
        if value < 0:
            raise SchemaViolation(path, "count must be non-negative")
        return value
    if name in _CANONICAL_FLOATS:
        if value < 0:
            raise SchemaViolation(path, f"{name} must be non-negative")
        if name == "pct" and value > 100:
            raise SchemaViolation(path, "pct must lie in [0, 100]")
    return float(value)


def _parse_bundle(node, path: str) -> StatsBundle:
    stats = _require_dict(node, path)
    bundle = StatsBundle()
    for name, raw in stats.items():
        value = _parse_stat_value(name, raw, f"{path}.{name}")
        if name == "count":
            bundle.count = int(value)
        elif name in _CANONICAL_FLOATS:
            setattr(bundle, name, value)
        else:
            bundle.extras[name] = value
    return bundle


def _parse_cell_map(node, path: str) -> CellMap:
    cells: CellMap = {}
    for y_id, row in _require_dict(node, path).items():
        y_path = f'{path}["{y_id}"]'
        out_row = cells.setdefault(y_id, {})
        for x_id, codes in _require_dict(row, y_path).items():
            x_path = f'{y_path}["{x_id}"]'
            out_codes = out_row.setdefault(x_id, {})
            for code, stats in _require_dict(codes, x_path).items():
                out_codes[code] = _parse_bundle(stats, f'{x_path}["{code}"]')
    return cells


def parse_snapshot(text: str | bytes, interval_length_ms: int) -> list[IntervalSnapshot]:
    """Parse a snapshot file back into snapshots, ascending by timestamp.

    The file format does not carry the bin length, so the caller supplies
    it (the store passes its configured base interval). Unknown statistic
    names land in ``StatsBundle.extras`` untouched.
    """
    try:
        doc = json.loads(text)
    except (ValueError, UnicodeDecodeError) as exc:
        raise SchemaViolation("$", f"not valid JSON: {exc}") from exc
    _require_dict(doc, "$")

    snapshots = []
    for ts_key, body in doc.items():
        path = f'$["{ts_key}"]'
        if not _TS_KEY.match(ts_key):
            raise SchemaViolation(path, "timestamp keys must be decimal Unix ms")
        if not isinstance(body, list) or len(body) != 1:
            raise SchemaViolation(path, "expected a one-element array")
        entry = _require_dict(body[0], f"{path}[0]")
        unknown = set(entry) - {"datacenter_services", "caller_callee_pairs"}
        if unknown:
            raise SchemaViolation(
                f"{path}[0].{sorted(unknown)[0]}", "unexpected key"
            )
        snapshots.append(
            IntervalSnapshot(
                interval_start=int(ts_key),
                interval_length_ms=interval_length_ms,
                datacenter_services=_parse_cell_map(
                    entry.get("datacenter_services", {}),
                    f"{path}[0].datacenter_services",
                ),
                caller_callee_pairs=_parse_cell_map(
                    entry.get("caller_callee_pairs", {}),
                    f"{path}[0].caller_callee_pairs",
                ),
            )
        )
    snapshots.sort(key=lambda s: s.interval_start)
    return snapshots


# --------------------------------------------------------------------------
# filesystem store


def _file_first_ts(path: Path) -> int | None:
    match = re.fullmatch(r"snapshots-(\d+)\.json", path.name)
    return int(match.group(1)) if match else None


class SnapshotStore:
    """Append-only snapshot timeline over local files.

    Snapshots accumulate in the currently open file until appending one
    more would push its serialized size past the cap; the file is then
    sealed and a fresh one starts. A single snapshot larger than the cap
    still gets its own file (with a logged warning) rather than being
    dropped. Single writer; readers always see sealed files plus an
    atomically replaced view of the open file.
    """

    def __init__(
        self,
        root: str | Path,
        interval_length_ms: int = 60_000,
        max_file_bytes: int = MAX_FILE_BYTES,
    ):
        self.root = Path(root)
        self.interval_length_ms = interval_length_ms
        self.max_file_bytes = max_file_bytes
        try:
            self.root.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StorageFailure(f"cannot create store root {self.root}: {exc}") from exc

        self._open_snapshots: list[IntervalSnapshot] = []
        self._open_path: Path | None = None
        self._last_start: int | None = None
        paths = self._file_paths()
        if paths:
            tail = parse_snapshot(self._read(paths[-1]), interval_length_ms)
            if tail:
                self._open_path = paths[-1]
                self._open_snapshots = tail
                self._last_start = tail[-1].interval_start

    def _file_paths(self) -> list[Path]:
        paths = [p for p in self.root.glob("snapshots-*.json") if _file_first_ts(p) is not None]
        paths.sort(key=_file_first_ts)  # type: ignore[arg-type]
        return paths

    def _read(self, path: Path) -> str:
        try:
            return path.read_text(encoding="utf-8")
        except OSError as exc:
            raise StorageFailure(f"cannot read {path}: {exc}") from exc

    def _write_atomic(self, path: Path, data: bytes) -> None:
        tmp = path.with_suffix(".tmp")
        try:
            tmp.write_bytes(data)
            tmp.replace(path)
        except OSError as exc:
            raise StorageFailure(f"cannot write {path}: {exc}") from exc

    def append(self, snapshot: IntervalSnapshot) -> SnapshotFile:
        """Append the next snapshot; starts must strictly increase."""
        if self._last_start is not None and snapshot.interval_start <= self._last_start:
            raise OutOfOrderAppend(
                f"snapshot start {snapshot.interval_start} does not advance "
                f"past {self._last_start}"
            )

        candidate = self._open_snapshots + [snapshot]
        data = serialize_snapshots(candidate).encode("utf-8")
        if self._open_snapshots and len(data) > self.max_file_bytes:
            # Seal the open file (leave it as is) and rotate.
            candidate = [snapshot]
            data = serialize_snapshots(candidate).encode("utf-8")
        if len(candidate) == 1:
            self._open_path = self.root / f"snapshots-{snapshot.interval_start}.json"
            if len(data) > self.max_file_bytes:
                log.warning(
                    "snapshot at %d serializes to %d bytes, above the %d-byte "
                    "file cap; storing it alone in %s",
                    snapshot.interval_start, len(data), self.max_file_bytes,
                    self._open_path.name,
                )
        assert self._open_path is not None
        self._write_atomic(self._open_path, data)
        self._open_snapshots = candidate
        self._last_start = snapshot.interval_start
        return SnapshotFile(
            path=self._open_path,
            first_ts=candidate[0].interval_start,
            last_ts=snapshot.interval_start,
            byte_size=len(data),
        )

    def load_window(self, from_ms: int, to_ms: int) -> list[IntervalSnapshot]:
        """All snapshots with interval_start in [from_ms, to_ms), ascending."""
        if from_ms >= to_ms:
            raise ValueError("window start must precede window end")
        out: list[IntervalSnapshot] = []
        for path in self._file_paths():
            first_ts = _file_first_ts(path)
            if first_ts is not None and first_ts >= to_ms:
                break
            for snap in parse_snapshot(self._read(path), self.interval_length_ms):
                if from_ms <= snap.interval_start < to_ms:
                    out.append(snap)
        out.sort(key=lambda s: s.interval_start)
        return out

    def files(self) -> list[SnapshotFile]:
        """Enumerate store files with their timestamp ranges and sizes."""
        out = []
        for path in self._file_paths():
            snaps = parse_snapshot(self._read(path), self.interval_length_ms)
            out.append(
                SnapshotFile(
                    path=path,
                    first_ts=snaps[0].interval_start,
                    last_ts=snaps[-1].interval_start,
                    byte_size=path.stat().st_size,
                )
            )
        return out

    @property
    def last_start(self) -> int | None:
        return self._last_start

    @property
    def first_start(self) -> int | None:
        paths = self._file_paths()
        if not paths:
            return None
        return _file_first_ts(paths[0])
