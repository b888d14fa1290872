"""CSV and manifest writers with byte-stable output."""
from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import json
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from . import __version__


def _fmt(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    return path


def write_json(path: Path, payload: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def sha256_file(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def utc_now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def write_manifest(output: Path, *, command: str, config_hash: str, master_seed: int,
                   parameters: dict, workers: int, partition_rule: str,
                   started_at: str) -> Path:
    """Write ``<output>.manifest.json`` next to an output file."""
    output = Path(output)
    manifest = {
        "artifact_version": __version__,
        "command": command,
        "config_hash": config_hash,
        "master_seed": master_seed,
        "parameters": parameters,
        "workers": workers,
        "partition_rule": partition_rule,
        "output_file": output.name,
        "output_sha256": sha256_file(output),
        "started_at": started_at,
        "finished_at": utc_now(),
    }
    return write_json(output.with_name(output.name + ".manifest.json"), manifest)
