"""Binary storage for per-layer representation sets.

A dump holds one layer's representations for a whole evaluation set: an
``N x d`` float32 matrix plus integer class labels. The on-disk layout is
little-endian and fixed:

    magic "RDMP" | version u32 | layer_index u32 | N u64 | d u64 | C u32
    labels  N x u32
    data    N x d x f32, row-major

A manifest is a JSON array describing one dump file per layer, ordered by
depth, with optional stage annotations.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAGIC = b"RDMP"
VERSION = 1

_HEADER = struct.Struct("<4sIIQQI")


@dataclass(frozen=True, eq=False)
class RepresentationSet:
    """One layer's representations with labels.

    Attributes:
        data: float matrix of shape (N, d), all values finite. float64 input
            is kept at full precision in memory; everything else is coerced
            to float32, the storage precision of the dump format.
        labels: uint32 vector of length N, values in [0, num_classes).
        num_classes: declared number of classes C (may exceed max(labels)+1).
        layer_index: depth index of the layer this set was captured from.
    """

    data: np.ndarray
    labels: np.ndarray
    num_classes: int
    layer_index: int = 0

    def __post_init__(self) -> None:
        dtype = np.float64 if np.asarray(self.data).dtype == np.float64 else np.float32
        data = np.ascontiguousarray(self.data, dtype=dtype)
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise ValueError(f"data must be a non-empty 2-D matrix, got shape {np.shape(self.data)}")
        if not np.isfinite(data).all():
            raise ValueError("data contains non-finite values")
        labels = np.asarray(self.labels)
        if labels.ndim != 1 or labels.shape[0] != data.shape[0]:
            raise ValueError("labels must be 1-D with one entry per row of data")
        if labels.size and (np.any(labels < 0) or np.any(labels >= self.num_classes)):
            raise ValueError(f"labels must lie in [0, {self.num_classes})")
        if not 1 <= self.num_classes <= 0xFFFFFFFF:
            raise ValueError("num_classes must be a positive u32")
        if not 0 <= self.layer_index <= 0xFFFFFFFF:
            raise ValueError("layer_index must be a non-negative u32")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "labels", np.ascontiguousarray(labels, dtype=np.uint32))

    @property
    def num_samples(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels.astype(np.int64), minlength=self.num_classes)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RepresentationSet):
            return NotImplemented
        return (
            self.num_classes == other.num_classes
            and self.layer_index == other.layer_index
            and np.array_equal(self.data, other.data)
            and np.array_equal(self.labels, other.labels)
        )


def write_dump(rep_set: RepresentationSet, path: str | Path) -> None:
    """Write a representation set to ``path`` in the binary dump format.

    Data is stored as float32; float64 sets are rounded on write, so the
    write/read round trip is lossless exactly for float32 sets.
    """
    header = _HEADER.pack(
        MAGIC,
        VERSION,
        rep_set.layer_index,
        rep_set.num_samples,
        rep_set.dim,
        rep_set.num_classes,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(rep_set.labels.astype("<u4").tobytes())
        fh.write(rep_set.data.astype("<f4").tobytes())


def read_dump(path: str | Path) -> RepresentationSet:
    """Read a representation set written by :func:`write_dump`.

    Raises:
        ValueError: on bad magic, unsupported version, truncated or oversized
            payload, out-of-range labels, or non-finite data.
    """
    blob = Path(path).read_bytes()
    if len(blob) < _HEADER.size:
        raise ValueError(f"{path}: truncated header ({len(blob)} bytes)")
    magic, version, layer_index, n, d, c = _HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}, not a representation dump")
    if version != VERSION:
        raise ValueError(f"{path}: unsupported version {version}")
    expected = _HEADER.size + 4 * n + 4 * n * d
    if len(blob) != expected:
        raise ValueError(f"{path}: payload is {len(blob)} bytes, header implies {expected}")
    labels = np.frombuffer(blob, dtype="<u4", count=n, offset=_HEADER.size)
    data = np.frombuffer(blob, dtype="<f4", count=n * d, offset=_HEADER.size + 4 * n)
    if labels.size and labels.max(initial=0) >= c:
        raise ValueError(f"{path}: label {labels.max()} out of range for {c} classes")
    if not np.isfinite(data).all():
        raise ValueError(f"{path}: data contains non-finite values")
    return RepresentationSet(
        data=data.reshape(n, d).copy(),
        labels=labels.copy(),
        num_classes=c,
        layer_index=layer_index,
    )


@dataclass(frozen=True)
class ManifestEntry:
    """One manifest row: a layer index and the dump file that holds it."""

    layer: int
    file: str
    stage: int | None = None
    desc: str | None = None


_REQUIRED_KEYS = {"layer", "file"}
_ALLOWED_KEYS = {"layer", "file", "stage", "desc"}


def load_manifest(path: str | Path) -> list[ManifestEntry]:
    """Parse a manifest JSON file into entries, leaving file paths as written."""
    raw = json.loads(Path(path).read_text())
    if not isinstance(raw, list):
        raise ValueError(f"{path}: manifest must be a JSON array")
    entries = []
    for i, item in enumerate(raw):
        if not isinstance(item, dict):
            raise ValueError(f"{path}: entry {i} is not an object")
        missing = _REQUIRED_KEYS - item.keys()
        unknown = item.keys() - _ALLOWED_KEYS
        if missing or unknown:
            raise ValueError(f"{path}: entry {i} missing {sorted(missing)}, unknown {sorted(unknown)}")
        layer, file = item["layer"], item["file"]
        stage, desc = item.get("stage"), item.get("desc")
        if not isinstance(layer, int) or isinstance(layer, bool):
            raise ValueError(f"{path}: entry {i} layer must be an integer")
        if not isinstance(file, str):
            raise ValueError(f"{path}: entry {i} file must be a string")
        if stage is not None and (not isinstance(stage, int) or isinstance(stage, bool)):
            raise ValueError(f"{path}: entry {i} stage must be an integer or null")
        if desc is not None and not isinstance(desc, str):
            raise ValueError(f"{path}: entry {i} desc must be a string or null")
        entries.append(ManifestEntry(layer=layer, file=file, stage=stage, desc=desc))
    return entries


def resolve_dump_path(manifest_path: str | Path, entry: ManifestEntry) -> Path:
    """Resolve an entry's file path relative to the manifest's directory."""
    p = Path(entry.file)
    return p if p.is_absolute() else Path(manifest_path).parent / p


def validate_manifest(path: str | Path) -> list[str]:
    """Check a manifest and its dump files; return a list of problems.

    An empty list means the manifest is internally consistent: layer indices
    strictly increase, stage annotations (when present) never decrease, every
    dump file parses, and all dumps agree on sample count, labels, and class
    count. Each problem is one human-readable string.
    """
    problems: list[str] = []
    try:
        entries = load_manifest(path)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        return [str(exc)]
    if not entries:
        return ["manifest is empty"]

    for prev, cur in zip(entries, entries[1:]):
        if cur.layer <= prev.layer:
            problems.append(f"layer indices must strictly increase: {prev.layer} then {cur.layer}")
        if prev.stage is not None and cur.stage is not None and cur.stage < prev.stage:
            problems.append(f"stage must not decrease: {prev.stage} then {cur.stage} at layer {cur.layer}")

    reference: RepresentationSet | None = None
    for entry in entries:
        dump_path = resolve_dump_path(path, entry)
        try:
            rep_set = read_dump(dump_path)
        except (OSError, ValueError) as exc:
            problems.append(f"layer {entry.layer}: {exc}")
            continue
        if rep_set.layer_index != entry.layer:
            problems.append(
                f"layer {entry.layer}: dump declares layer_index {rep_set.layer_index}"
            )
        if reference is None:
            reference = rep_set
            continue
        if rep_set.num_samples != reference.num_samples:
            problems.append(f"layer {entry.layer}: {rep_set.num_samples} samples, expected {reference.num_samples}")
        elif not np.array_equal(rep_set.labels, reference.labels):
            problems.append(f"layer {entry.layer}: labels differ from earlier layers")
        if rep_set.num_classes != reference.num_classes:
            problems.append(f"layer {entry.layer}: {rep_set.num_classes} classes, expected {reference.num_classes}")
    return problems
