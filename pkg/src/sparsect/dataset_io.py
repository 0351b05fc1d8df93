"""Tensor-container file format and dataset manifest.

Container layout (little-endian throughout)::

    bytes 0-7    magic  b"SPCT0001"
    bytes 8-11   uint32 header length H
    bytes 12-..  H bytes of UTF-8 JSON: {"dtype": "f32", "shape": [...],
                 "layout": "row-major", ...free-form metadata...}
    remainder    row-major float32 payload, prod(shape) * 4 bytes

The manifest is a JSON document with subject-level split assignments and
per-case / per-sample entries; see README for the schema.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

MAGIC = b"SPCT0001"

SPLITS = ("train", "validation", "test")
ROLES = ("input-2d", "input-2d3ch", "input-25d", "input-3d", "target", "sparse", "full")


class DatasetIOError(IOError):
    pass


class FormatError(DatasetIOError):
    """File is not a tensor container (bad magic or malformed header)."""


class CorruptionError(DatasetIOError):
    """Payload length does not match the declared shape."""


def write_tensor(path, values, metadata: dict | None = None) -> None:
    values = np.asarray(values)
    if values.size == 0 or values.ndim == 0:
        raise ValueError("tensor must be non-empty with at least one dimension")
    header = {"dtype": "f32", "shape": list(values.shape), "layout": "row-major"}
    header.update(metadata or {})
    blob = json.dumps(header).encode("utf-8")
    payload = np.ascontiguousarray(values, dtype="<f4").tobytes()
    path = Path(path)
    try:
        with open(path, "wb") as f:
            f.write(MAGIC)
            f.write(struct.pack("<I", len(blob)))
            f.write(blob)
            f.write(payload)
    except OSError as exc:
        raise DatasetIOError(f"failed writing tensor to {path}: {exc}") from exc


def read_tensor(path) -> tuple[np.ndarray, dict]:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise DatasetIOError(f"failed reading tensor from {path}: {exc}") from exc
    if len(raw) < 12 or raw[:8] != MAGIC:
        raise FormatError(f"{path}: not a tensor container (bad magic)")
    (hlen,) = struct.unpack("<I", raw[8:12])
    if len(raw) < 12 + hlen:
        raise CorruptionError(f"{path}: truncated header")
    try:
        header = json.loads(raw[12:12 + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"{path}: malformed header JSON: {exc}") from exc
    shape = tuple(header.get("shape", ()))
    expected = int(np.prod(shape)) * 4
    payload = raw[12 + hlen:]
    if len(payload) != expected:
        raise CorruptionError(
            f"{path}: payload is {len(payload)} bytes, header shape {shape} needs {expected}"
        )
    values = np.frombuffer(payload, dtype="<f4").reshape(shape)
    meta = {k: v for k, v in header.items() if k not in ("dtype", "shape", "layout")}
    return values.copy(), meta


def assign_splits(subject_ids, seed: int) -> dict:
    """Subject-level ~50:10:40 split, deterministic per seed.

    Validation and test take floor(0.1 n) and floor(0.4 n) subjects (at least
    one each); train gets the remainder. 22 subjects split 12/2/8.
    """
    ids = list(subject_ids)
    if len(ids) < 3:
        raise ValueError(f"need at least 3 subjects, got {len(ids)}")
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate subject ids")
    n = len(ids)
    n_val = max(1, int(n * 0.1))
    n_test = max(1, int(n * 0.4))
    rng = np.random.default_rng(seed)
    order = [ids[i] for i in rng.permutation(n)]
    subjects = {}
    for sid in order[: n - n_val - n_test]:
        subjects[sid] = "train"
    for sid in order[n - n_val - n_test: n - n_test]:
        subjects[sid] = "validation"
    for sid in order[n - n_test:]:
        subjects[sid] = "test"
    return {"seed": seed, "subjects": subjects, "cases": [], "samples": []}


def save_manifest(manifest: dict, path) -> None:
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True))


def load_manifest(path) -> dict:
    return json.loads(Path(path).read_text())


def validate_manifest(manifest: dict, root) -> None:
    """Check referential integrity: files exist and header shapes match."""
    root = Path(root)
    for split in manifest["subjects"].values():
        if split not in SPLITS:
            raise ValueError(f"unknown split {split!r}")
    entries = list(manifest.get("cases", []))
    for case in entries:
        for key, relpath in case.get("files", {}).items():
            p = root / relpath
            if not p.exists():
                raise FileNotFoundError(f"manifest references missing file {p}")
            values, _ = read_tensor(p)
            want = case.get("shapes", {}).get(key)
            if want is not None and list(values.shape) != list(want):
                raise ValueError(
                    f"{p}: header shape {list(values.shape)} != manifest {want}"
                )
    for sample in manifest.get("samples", []):
        for key in ("input", "target"):
            p = root / sample[key]
            if not p.exists():
                raise FileNotFoundError(f"manifest references missing file {p}")
            values, _ = read_tensor(p)
            want = sample[f"{key}_shape"]
            if list(values.shape) != list(want):
                raise ValueError(f"{p}: header shape {list(values.shape)} != manifest {want}")
