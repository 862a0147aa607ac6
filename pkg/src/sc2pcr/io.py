"""File formats: correspondence files, transform JSON, config JSON, CSV.

Correspondence files come in two flavors:

* text - one pair per line, six whitespace-separated decimals
  ``sx sy sz tx ty tz``; ``#`` starts a comment; UTF-8.
* binary - magic ``SC2C``, one version byte (0x01), little-endian uint32
  count, then 6N little-endian float32 values in the same pair order.

Transform/result files are JSON objects with ``rotation`` (9 numbers,
row-major), ``translation`` (3 numbers), ``inlier_count``,
``inlier_indices`` and a ``config`` echo; ground-truth files share the
shape. Config files mirror :class:`~sc2pcr.pipeline.RegistrationConfig`
field names.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .geometry import CorrespondenceSet, RigidTransform
from .pipeline import RegistrationConfig, RegistrationResult

BINARY_MAGIC = b"SC2C"
BINARY_VERSION = 1


def read_correspondences(path) -> CorrespondenceSet:
    """Load a correspondence file, sniffing binary vs text by the magic bytes."""
    path = Path(path)
    with path.open("rb") as fh:
        head = fh.read(4)
    if head == BINARY_MAGIC:
        return _read_binary(path)
    return _read_text(path)


def _read_text(path: Path) -> CorrespondenceSet:
    rows = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            parts = body.split()
            if len(parts) != 6:
                raise ValueError(f"{path}:{lineno}: expected 6 values, got {len(parts)}")
            rows.append([float(x) for x in parts])
    if not rows:
        raise ValueError(f"{path}: no correspondences found")
    data = np.asarray(rows, dtype=np.float64)
    return CorrespondenceSet(data[:, :3], data[:, 3:])


def _read_binary(path: Path) -> CorrespondenceSet:
    raw = path.read_bytes()
    if len(raw) < 9 or raw[:4] != BINARY_MAGIC:
        raise ValueError(f"{path}: not a binary correspondence file")
    version = raw[4]
    if version != BINARY_VERSION:
        raise ValueError(f"{path}: unsupported version {version}")
    (count,) = struct.unpack_from("<I", raw, 5)
    expected = 9 + 24 * count
    if len(raw) != expected:
        raise ValueError(f"{path}: expected {expected} bytes for {count} pairs, got {len(raw)}")
    data = np.frombuffer(raw, dtype="<f4", offset=9).reshape(count, 6).astype(np.float64)
    return CorrespondenceSet(data[:, :3], data[:, 3:])


def write_correspondences_text(path, corrs: CorrespondenceSet) -> None:
    lines = ["# sx sy sz tx ty tz\n"]
    for s, t in zip(corrs.source, corrs.target):
        values = [repr(float(v)) for v in (*s, *t)]
        lines.append(" ".join(values) + "\n")
    Path(path).write_text("".join(lines), encoding="utf-8", newline="\n")


def write_correspondences_binary(path, corrs: CorrespondenceSet) -> None:
    data = np.hstack([corrs.source, corrs.target]).astype("<f4")
    payload = BINARY_MAGIC + bytes([BINARY_VERSION]) + struct.pack("<I", corrs.n) + data.tobytes()
    Path(path).write_bytes(payload)


def write_correspondences(path, corrs: CorrespondenceSet, fmt: str | None = None) -> None:
    """Write text or binary; ``fmt=None`` picks binary for a ``.bin`` suffix."""
    if fmt is None:
        fmt = "binary" if Path(path).suffix == ".bin" else "text"
    if fmt == "text":
        write_correspondences_text(path, corrs)
    elif fmt == "binary":
        write_correspondences_binary(path, corrs)
    else:
        raise ValueError(f"unknown correspondence format {fmt!r}")


def transform_to_dict(
    transform: RigidTransform,
    inlier_count: int | None = None,
    inlier_indices=None,
    config: dict | None = None,
) -> dict:
    return {
        "rotation": [float(x) for x in transform.rotation.ravel()],
        "translation": [float(x) for x in transform.translation],
        "inlier_count": int(inlier_count) if inlier_count is not None else 0,
        "inlier_indices": [int(i) for i in (inlier_indices if inlier_indices is not None else [])],
        "config": config or {},
    }


def result_to_dict(result: RegistrationResult, cfg: RegistrationConfig) -> dict:
    return transform_to_dict(
        result.transform,
        inlier_count=result.inlier_count,
        inlier_indices=np.nonzero(result.inlier_mask)[0],
        config=cfg.to_dict(),
    )


def write_transform_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8", newline="\n")


def read_transform_json(path):
    """Load a transform file; returns (RigidTransform, inlier_indices or None)."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    rotation = np.asarray(data["rotation"], dtype=np.float64).reshape(3, 3)
    translation = np.asarray(data["translation"], dtype=np.float64)
    indices = data.get("inlier_indices")
    if indices is not None:
        indices = np.asarray(indices, dtype=np.int64)
    return RigidTransform(rotation, translation), indices


def load_config(path=None, overrides: dict | None = None) -> RegistrationConfig:
    """Config from an optional JSON file with CLI overrides on top."""
    data: dict = {}
    if path is not None:
        data.update(json.loads(Path(path).read_text(encoding="utf-8")))
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value
    return RegistrationConfig.from_dict(data)
