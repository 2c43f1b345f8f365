"""Bit-exact file formats and report emission.

Tensor container (.dce):
    magic "DCE1" | version u8 (=1) | rank u8 | dims rank*u32 LE |
    payload row-major f32 LE (4 * prod(dims) bytes) | meta_len u32 LE |
    metadata meta_len bytes of UTF-8 JSON
Rank 3 is a feature map (Hf, Wf, C); rank 2 with a "tokens" list in the
metadata is a text bank (K, C).

Depth file (.dpm):
    magic "DPM1" | height u32 LE | width u32 LE |
    payload row-major f32 LE, meters, invalid pixels encoded as NaN

Manifest: JSON Lines, one record per line with keys image_id, features_path,
and optional gt_path / scene_class. Relative paths resolve against the
manifest's own directory.

Everything is little-endian on disk regardless of host byte order.
"""

from __future__ import annotations

import json
import math
import os
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    BadMagic,
    FormatError,
    ManifestError,
    MetadataMismatch,
    TruncatedPayload,
    UnsupportedRank,
    UnsupportedVersion,
    ValidationError,
)
from .metrics import MetricReport
from .model import DepthMap, FeatureMap, Manifest, ManifestRecord, TextBank

CONTAINER_MAGIC = b"DCE1"
CONTAINER_VERSION = 1
DEPTH_MAGIC = b"DPM1"

REPORT_KEYS = ("delta1", "delta2", "delta3", "rel", "log10", "rmse", "n_images", "n_pixels")


# ---------------------------------------------------------------- containers


def write_container(path, array, metadata: Mapping | None = None) -> None:
    """Write one tensor (converted to f32 LE) plus its JSON metadata."""
    arr = np.ascontiguousarray(array, dtype="<f4")
    meta_bytes = b""
    if metadata:
        meta_bytes = json.dumps(dict(metadata), ensure_ascii=False, sort_keys=True).encode(
            "utf-8"
        )
    with open(path, "wb") as f:
        f.write(CONTAINER_MAGIC)
        f.write(bytes([CONTAINER_VERSION, arr.ndim]))
        f.write(np.asarray(arr.shape, dtype="<u4").tobytes())
        f.write(arr.tobytes())
        f.write(np.asarray([len(meta_bytes)], dtype="<u4").tobytes())
        f.write(meta_bytes)


def write_feature_map(path, fm: FeatureMap) -> None:
    write_container(path, fm.data, {"source_id": fm.source_id})


def write_text_bank(path, tb: TextBank) -> None:
    write_container(path, tb.embeddings, {"tokens": list(tb.tokens), "template": tb.template})


def read_tensor(path) -> tuple[np.ndarray, dict]:
    """Decode a container file into (f32-exact float64 array, metadata dict)."""
    with open(path, "rb") as f:
        blob = f.read()
    if len(blob) < 4:
        raise TruncatedPayload(f"{path}: shorter than the 4-byte magic")
    if blob[:4] != CONTAINER_MAGIC:
        raise BadMagic(f"{path}: magic {blob[:4]!r}, expected {CONTAINER_MAGIC!r}")
    if len(blob) < 6:
        raise TruncatedPayload(f"{path}: header cut short")
    version, rank = blob[4], blob[5]
    if version != CONTAINER_VERSION:
        raise UnsupportedVersion(f"{path}: version {version}")
    offset = 6
    if len(blob) < offset + 4 * rank:
        raise TruncatedPayload(f"{path}: dims cut short")
    dims = np.frombuffer(blob, dtype="<u4", count=rank, offset=offset)
    offset += 4 * rank
    count = int(np.prod(dims, dtype=np.int64)) if rank else 1
    if len(blob) < offset + 4 * count:
        raise TruncatedPayload(f"{path}: payload needs {4 * count} bytes")
    payload = np.frombuffer(blob, dtype="<f4", count=count, offset=offset)
    offset += 4 * count
    if len(blob) < offset + 4:
        raise TruncatedPayload(f"{path}: meta_len cut short")
    meta_len = int(np.frombuffer(blob, dtype="<u4", count=1, offset=offset)[0])
    offset += 4
    if len(blob) < offset + meta_len:
        raise TruncatedPayload(f"{path}: metadata needs {meta_len} bytes")
    if len(blob) > offset + meta_len:
        raise FormatError(f"{path}: {len(blob) - offset - meta_len} trailing bytes")
    metadata: dict = {}
    if meta_len:
        try:
            metadata = json.loads(blob[offset : offset + meta_len].decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise MetadataMismatch(f"{path}: metadata does not parse: {e}") from e
        if not isinstance(metadata, dict):
            raise MetadataMismatch(f"{path}: metadata must be a JSON object")
    return payload.astype(np.float64).reshape(tuple(int(d) for d in dims)), metadata


def read_container(path) -> FeatureMap | TextBank:
    """Load a container as a FeatureMap (rank 3) or TextBank (rank 2)."""
    array, metadata = read_tensor(path)
    if array.ndim == 3:
        return FeatureMap(array, source_id=str(metadata.get("source_id", "")))
    if array.ndim == 2:
        tokens = metadata.get("tokens")
        if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
            raise MetadataMismatch(f"{path}: rank-2 container needs a token list")
        if len(tokens) != array.shape[0]:
            raise MetadataMismatch(
                f"{path}: {len(tokens)} tokens for {array.shape[0]} embedding rows"
            )
        template = metadata.get("template", "This object is {}")
        return TextBank(tuple(tokens), array, template=str(template))
    raise UnsupportedRank(f"{path}: rank {array.ndim} container has no in-memory type")


def read_feature_map(path) -> FeatureMap:
    obj = read_container(path)
    if not isinstance(obj, FeatureMap):
        raise MetadataMismatch(f"{path}: expected a rank-3 feature-map container")
    return obj


def read_text_bank(path) -> TextBank:
    obj = read_container(path)
    if not isinstance(obj, TextBank):
        raise MetadataMismatch(f"{path}: expected a rank-2 text-bank container")
    return obj


# --------------------------------------------------------------- depth files


def write_depth_file(path, dm: DepthMap) -> None:
    payload = np.where(dm.valid, dm.data, np.nan).astype("<f4")
    with open(path, "wb") as f:
        f.write(DEPTH_MAGIC)
        f.write(np.asarray([dm.height, dm.width], dtype="<u4").tobytes())
        f.write(payload.tobytes())


def read_depth_file(path) -> DepthMap:
    with open(path, "rb") as f:
        blob = f.read()
    if len(blob) < 4:
        raise TruncatedPayload(f"{path}: shorter than the 4-byte magic")
    if blob[:4] != DEPTH_MAGIC:
        raise BadMagic(f"{path}: magic {blob[:4]!r}, expected {DEPTH_MAGIC!r}")
    if len(blob) < 12:
        raise TruncatedPayload(f"{path}: header cut short")
    height, width = (int(v) for v in np.frombuffer(blob, dtype="<u4", count=2, offset=4))
    expected = 12 + 4 * height * width
    if len(blob) < expected:
        raise TruncatedPayload(f"{path}: payload needs {4 * height * width} bytes")
    if len(blob) > expected:
        raise FormatError(f"{path}: {len(blob) - expected} trailing bytes")
    data = np.frombuffer(blob, dtype="<f4", offset=12).astype(np.float64)
    return DepthMap(data.reshape(height, width))


# ----------------------------------------------------------------- manifests


def load_manifest(path) -> Manifest:
    """Parse a JSONL manifest; paths are resolved and must exist."""
    base = os.path.dirname(os.path.abspath(path))
    records = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise ManifestError(f"{path}:{lineno}: not valid JSON: {e}") from e
            if not isinstance(obj, dict) or "image_id" not in obj or "features_path" not in obj:
                raise ManifestError(f"{path}:{lineno}: need image_id and features_path")
            rec = ManifestRecord(
                image_id=str(obj["image_id"]),
                features_path=_resolve(base, obj["features_path"]),
                gt_path=_resolve(base, obj["gt_path"]) if obj.get("gt_path") else None,
                scene_class=str(obj["scene_class"]) if obj.get("scene_class") else None,
            )
            for p in (rec.features_path, rec.gt_path):
                if p is not None and not os.path.exists(p):
                    raise ManifestError(f"{path}:{lineno}: missing file {p}")
            records.append(rec)
    return Manifest(tuple(records))


def write_manifest(path, manifest: Manifest) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for rec in manifest:
            obj = {"image_id": rec.image_id, "features_path": rec.features_path}
            if rec.gt_path is not None:
                obj["gt_path"] = rec.gt_path
            if rec.scene_class is not None:
                obj["scene_class"] = rec.scene_class
            f.write(json.dumps(obj, ensure_ascii=False) + "\n")


def _resolve(base: str, p) -> str:
    p = str(p)
    return p if os.path.isabs(p) else os.path.join(base, p)


# ------------------------------------------------------------------- reports


def format_report(table: Sequence[tuple[str, MetricReport]] | Mapping[str, MetricReport]) -> str:
    """Render named reports as deterministic [name] blocks, 6 significant digits."""
    items = list(table.items()) if isinstance(table, Mapping) else list(table)
    if not items:
        raise ValidationError("report table is empty")
    lines = []
    for name, report in items:
        lines.append(f"[{name}]")
        for key in REPORT_KEYS:
            value = getattr(report, key)
            if key in ("n_images", "n_pixels"):
                lines.append(f"{key} = {int(value)}")
            else:
                lines.append(f"{key} = {float(value):.6g}")
        lines.append("")
    return "\n".join(lines[:-1]) + "\n"


def write_report(table, path) -> None:
    text = format_report(table)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


# ---------------------------------------------------------------- PGM export


def export_pgm(dm: DepthMap, path, max_depth: float = 10.0) -> None:
    """16-bit binary PGM: pixel = round-half-up(clamp(d / max_depth, 0, 1) * 65535).

    Invalid pixels render as 0. Samples are big-endian as the format requires.
    """
    if not (max_depth > 0 and math.isfinite(max_depth)):
        raise ValidationError(f"max_depth must be positive and finite: {max_depth}")
    scaled = np.clip(np.where(dm.valid, dm.data, 0.0) / max_depth, 0.0, 1.0) * 65535.0
    pixels = np.floor(scaled + 0.5).astype(">u2")
    with open(path, "wb") as f:
        f.write(f"P5\n{dm.width} {dm.height}\n65535\n".encode("ascii"))
        f.write(pixels.tobytes())
