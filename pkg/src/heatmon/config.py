"""Service configuration."""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .zipkin import DEFAULT_INSTANCE_TAG


class ClockMode(str, Enum):
    WALL = "wall"
    MANUAL = "manual"  # clock advanced via the API; for tests and replay


@dataclass
class ServiceConfig:
    listen_port: int = 8080
    data_dir: Path = field(default_factory=lambda: Path("data"))
    base_interval_ms: int = 60_000  # matches the 1-minute publication cadence
    instance_tag_key: str = DEFAULT_INSTANCE_TAG
    clock_mode: ClockMode = ClockMode.WALL
    ui_dir: Path | None = None

    def validate(self) -> None:
        if self.base_interval_ms <= 0:
            raise ValueError("base_interval_ms must be positive")
        self.data_dir = Path(self.data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        if not os.access(self.data_dir, os.W_OK):
            raise ValueError(f"data_dir {self.data_dir} is not writable")
