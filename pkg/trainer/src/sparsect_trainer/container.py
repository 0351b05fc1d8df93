"""Reader/writer for the tensor-container interchange format.

Layout (little-endian throughout)::

    bytes 0-7    magic  b"SPCT0001"
    bytes 8-11   uint32 header length H
    bytes 12-..  H bytes of UTF-8 JSON: {"dtype": "f32", "shape": [...],
                 "layout": "row-major", ...free-form metadata...}
    remainder    row-major float32 payload, prod(shape) * 4 bytes

Independent implementation of the format the data-engineering toolkit
publishes; the two components share only the bytes on disk.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

MAGIC = b"SPCT0001"


class ContainerError(IOError):
    pass


def write_tensor(path, values, metadata: dict | None = None) -> None:
    values = np.asarray(values)
    if values.size == 0 or values.ndim == 0:
        raise ValueError("tensor must be non-empty with at least one dimension")
    header = {"dtype": "f32", "shape": list(values.shape), "layout": "row-major"}
    header.update(metadata or {})
    blob = json.dumps(header).encode("utf-8")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", len(blob)))
        f.write(blob)
        f.write(np.ascontiguousarray(values, dtype="<f4").tobytes())


def read_tensor(path) -> tuple[np.ndarray, dict]:
    raw = Path(path).read_bytes()
    if len(raw) < 12 or raw[:8] != MAGIC:
        raise ContainerError(f"{path}: not a tensor container")
    (hlen,) = struct.unpack("<I", raw[8:12])
    if len(raw) < 12 + hlen:
        raise ContainerError(f"{path}: truncated header")
    header = json.loads(raw[12:12 + hlen].decode("utf-8"))
    shape = tuple(header.get("shape", ()))
    payload = raw[12 + hlen:]
    if len(payload) != int(np.prod(shape)) * 4:
        raise ContainerError(f"{path}: payload length does not match shape {shape}")
    values = np.frombuffer(payload, dtype="<f4").reshape(shape).copy()
    meta = {k: v for k, v in header.items() if k not in ("dtype", "shape", "layout")}
    return values, meta


def load_manifest(root) -> dict:
    return json.loads((Path(root) / "manifest.json").read_text())
