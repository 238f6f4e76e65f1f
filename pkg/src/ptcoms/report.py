"""Deterministic CSV/JSON emission and run manifests."""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .params import SystemParams, dump_config


def config_hash(params: SystemParams) -> str:
    return hashlib.sha256(dump_config(params).encode()).hexdigest()


def fmt(value) -> str:
    """Shortest round-trip text for floats; other values via ``str``."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return "nan" if math.isnan(value) else repr(value)
    return str(value)


def write_csv(path, command: str, digest: str, columns, rows) -> Path:
    """Write ``rows`` under a ``#`` header carrying the hash and units.

    ``columns`` is a sequence of ``(name, unit)`` pairs.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    units = ", ".join(f"{name} [{unit}]" for name, unit in columns)
    lines = [f"# ptcoms {command} config_sha256={digest} columns: {units}"]
    lines.append(",".join(name for name, _ in columns))
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")
    return path


def write_json(path, payload) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, allow_nan=True) + "\n")
    return path


@dataclass
class RunManifest:
    command: str
    config_hash: str
    deterministic: bool = True
    outputs: list = field(default_factory=list)
    wall_time_s: float = 0.0
    _start: float = field(default_factory=time.perf_counter, repr=False)

    def add(self, path) -> None:
        self.outputs.append(str(path))

    def write(self, directory, stem: str) -> Path:
        self.wall_time_s = time.perf_counter() - self._start
        payload = {
            "command": self.command,
            "config_hash": self.config_hash,
            "deterministic": self.deterministic,
            "outputs": self.outputs,
            "wall_time_s": self.wall_time_s,
        }
        return write_json(Path(directory) / f"{stem}.manifest.json", payload)
