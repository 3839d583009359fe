"""Result envelopes, delimited output, and the run cache.

Every run is wrapped in an envelope carrying the echoed config, tool
version, wall time, and the actual seed, so any emitted number can be
reproduced. CSV payloads are byte-stable: '.' decimals, shortest
round-trip float repr, LF line endings, RFC-4180-style quoting. JSON uses
UTF-8 with sorted keys. The cache keys envelopes by a hash of
(config, version); a changed seed or tool version is a miss.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import warnings
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

from . import __version__

CACHE_ENV_VAR = "UMPTEEN_CACHE_DIR"


def format_cell(value: Any) -> str:
    """Canonical text for one CSV cell (bit-stable across platforms)."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Fraction):
        return repr(float(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def csv_content(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(cell) for cell in row])
    return buffer.getvalue()


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    path.write_text(csv_content(header, rows), encoding="utf-8", newline="")


@dataclass
class ResultEnvelope:
    """Attribution wrapper around one run's payload and delimited rows."""

    config: dict[str, Any]
    payload: Any
    version: str = __version__
    wall_time_s: float = 0.0
    cached: bool = False
    csv_header: list[str] = field(default_factory=list)
    csv_rows: list[list[Any]] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2, default=_json_default) + "\n"


def _json_default(value: Any) -> Any:
    if isinstance(value, Fraction):
        return str(value)
    raise TypeError(f"not JSON serialisable: {type(value)}")


def payload_json(payload: Any) -> str:
    """Stable serialisation of a payload alone (determinism comparisons)."""
    return json.dumps(payload, sort_keys=True, default=_json_default)


def config_hash(config: dict[str, Any], version: str = __version__) -> str:
    canonical = json.dumps(config, sort_keys=True, default=_json_default) + "|" + version
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def cache_lookup(
    config: dict[str, Any], cache_dir: Path, version: str = __version__
) -> ResultEnvelope | None:
    """Prior envelope for this exact (config, version), or None.

    Corrupt entries are ignored with a warning, never trusted.
    """
    entry = cache_dir / f"{config_hash(config, version)}.json"
    if not entry.is_file():
        return None
    try:
        raw = json.loads(entry.read_text(encoding="utf-8"))
        if raw["config"] != json.loads(payload_json(config)) or raw["version"] != version:
            return None
        return ResultEnvelope(
            config=raw["config"],
            payload=raw["payload"],
            version=raw["version"],
            wall_time_s=raw["wall_time_s"],
            cached=True,
            csv_header=raw["csv_header"],
            csv_rows=raw["csv_rows"],
        )
    except (OSError, ValueError, KeyError) as exc:
        warnings.warn(f"ignoring corrupt cache entry {entry}: {exc}")
        return None


def cache_store(envelope: ResultEnvelope, cache_dir: Path) -> Path:
    cache_dir.mkdir(parents=True, exist_ok=True)
    entry = cache_dir / f"{config_hash(envelope.config, envelope.version)}.json"
    entry.write_text(envelope.to_json(), encoding="utf-8")
    return entry
