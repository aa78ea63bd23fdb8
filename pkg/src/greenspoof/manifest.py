"""Run manifests: provenance metadata with a scheduling-independent digest.

The identity digest hashes everything that determines results (seed, grids,
layers, input file digests, code version, kernel backend) and deliberately
excludes knobs that only affect wall-clock behaviour (worker count,
timestamp). Two runs with equal digests must produce byte-identical
reports.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Union

from .errors import FormatError

_EXCLUDED_FROM_DIGEST = ("jobs", "created")


def sha256_file(path: Union[str, Path]) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


@dataclass
class RunManifest:
    command: str
    master_seed: int
    algorithms: list[str]
    layers: list[int]
    grids: dict
    inputs: dict[str, str]  # logical name -> sha256 of the input file
    package_version: str
    numpy_version: str
    backend: str
    jobs: int = 1
    created: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat())

    def identity_digest(self) -> str:
        payload = {k: v for k, v in asdict(self).items()
                   if k not in _EXCLUDED_FROM_DIGEST}
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def write(self, path: Union[str, Path]) -> None:
        payload = asdict(self)
        payload["identity_digest"] = self.identity_digest()
        Path(path).write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n",
            encoding="utf-8")

    @classmethod
    def read(cls, path: Union[str, Path]) -> "RunManifest":
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: bad manifest: {exc}") from None
        recorded = payload.pop("identity_digest", None)
        fields = {k: payload[k] for k in cls.__dataclass_fields__ if k in payload}
        manifest = cls(**fields)
        if recorded is not None and recorded != manifest.identity_digest():
            raise FormatError(f"{path}: identity digest mismatch")
        return manifest
