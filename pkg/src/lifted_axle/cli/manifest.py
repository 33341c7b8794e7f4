"""
Run manifests embedded in every report.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

DIST_NAME = "lifted-axle"


def tool_version() -> str:
    try:
        return metadata.version(DIST_NAME)
    except metadata.PackageNotFoundError:
        from .. import __version__
        return __version__


def file_digest(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    command: str
    config: Dict[str, Any] = field(default_factory=dict)
    inputs: Dict[str, str] = field(default_factory=dict)
    version: str = field(default_factory=tool_version)
    duration_s: Optional[float] = None

    def add_input(self, name: str, path: Path):
        self.inputs[name] = file_digest(path)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "config": dict(sorted(self.config.items())),
            "inputs": {k: f"sha256:{v}" for k, v in sorted(self.inputs.items())},
            "version": self.version,
            "duration_s": None if self.duration_s is None else round(self.duration_s, 4),
        }


def maybe(manifest: Optional[RunManifest]) -> Optional[Mapping[str, Any]]:
    return None if manifest is None else manifest.to_dict()
