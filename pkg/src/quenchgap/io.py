"""CSV with ``#`` metadata headers, and JSON helpers.

Floats are written with ``repr`` so every value round-trips bit-exactly.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from .errors import ConfigError


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, data) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_jsonable(data), indent=2, sort_keys=True) + "\n")
    return path


def read_json(path):
    return json.loads(Path(path).read_text())


def write_csv(path, columns: dict, metadata: dict | None = None) -> Path:
    """Write equal-length columns; metadata goes into ``# key: <json>`` lines."""
    path = Path(path)
    names = list(columns)
    arrays = [np.asarray(columns[n]) for n in names]
    if len({len(a) for a in arrays}) > 1:
        raise ValueError("all columns must have the same length")
    with path.open("w", newline="") as fh:
        for key, value in (metadata or {}).items():
            fh.write(f"# {key}: {json.dumps(_jsonable(value), sort_keys=True)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in zip(*arrays):
            w.writerow([repr(float(v)) for v in row])
    return path


def read_csv(path) -> tuple[dict, dict]:
    """Return ``(metadata, columns)`` with columns as float arrays."""
    path = Path(path)
    meta = {}
    body = []
    with path.open() as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition(":")
                try:
                    meta[key.strip()] = json.loads(value)
                except json.JSONDecodeError as exc:
                    raise ConfigError(f"{path}: bad metadata line {line.strip()!r}") from exc
            elif line.strip():
                body.append(line)
    rows = list(csv.reader(body))
    if not rows:
        raise ConfigError(f"{path}: no header row")
    names, data = rows[0], rows[1:]
    cols = {n: np.array([float(r[i]) for r in data]) for i, n in enumerate(names)}
    return meta, cols


def sha256(path) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()
