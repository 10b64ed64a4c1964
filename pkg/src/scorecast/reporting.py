"""Deterministic report writers.

Same inputs must produce byte-identical CSV/JSON payloads, so floats are
rendered with shortest round-trip repr and key order is fixed.  Volatile
run facts (timestamps, wall time) go only to the run manifest.
"""
from __future__ import annotations

import json
import subprocess
import time
from functools import lru_cache
from pathlib import Path
from typing import Optional, Sequence, Union

__all__ = [
    "artifact_version",
    "format_value",
    "write_csv",
    "write_json",
    "write_manifest",
]

_PACKAGE_VERSION = "0.1.0"


@lru_cache(maxsize=1)
def artifact_version() -> str:
    """Git describe of the working tree, falling back to the package version."""
    try:
        out = subprocess.run(
            ["git", "describe", "--tags", "--always", "--dirty"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=10,
        )
        if out.returncode == 0 and out.stdout.strip():
            return out.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    return f"v{_PACKAGE_VERSION}"


def format_value(value) -> str:
    """Render a cell: shortest round-trip repr for floats, plain str otherwise."""
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(
    path: Union[str, Path],
    columns: Sequence[str],
    rows: Sequence[Sequence],
    meta: Optional[dict] = None,
) -> None:
    """Write a tidy CSV with '# key=value' metadata comment lines on top.

    Every report names the artifact version and the effective configuration;
    consumers that dislike comments can skip lines starting with '#'.
    """
    meta = dict(meta or {})
    meta.setdefault("version", artifact_version())
    lines = [f"# {key}={_meta_value(val)}" for key, val in meta.items()]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _meta_value(value) -> str:
    if isinstance(value, (dict, list, tuple)):
        return json.dumps(_sanitize(value), separators=(",", ":"))
    return format_value(value)


def _sanitize(obj):
    """Make a payload strict-JSON safe: non-finite floats become null."""
    if isinstance(obj, float):
        return obj if obj == obj and obj not in (float("inf"), float("-inf")) else None
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    return obj


def write_json(path: Union[str, Path], payload: dict, config: Optional[dict] = None) -> None:
    """Write a JSON report carrying the artifact version and effective config."""
    document = {"version": artifact_version()}
    if config is not None:
        document["config"] = _sanitize(config)
    document.update(_sanitize(payload))
    Path(path).write_text(
        json.dumps(document, indent=2, allow_nan=False) + "\n", encoding="utf-8"
    )


def write_manifest(
    path: Union[str, Path],
    command: str,
    config: dict,
    seed: Optional[int],
    wall_time_s: float,
) -> None:
    """Run manifest: config echo, seed, version, wall time and a timestamp.

    The timestamp and wall time make this the one non-reproducible report
    file; determinism comparisons should exclude it.
    """
    payload = {
        "command": command,
        "version": artifact_version(),
        "seed": seed,
        "config": _sanitize(config),
        "wall_time_s": round(wall_time_s, 3),
        "timestamp_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    Path(path).write_text(json.dumps(payload, indent=2, allow_nan=False) + "\n", encoding="utf-8")
