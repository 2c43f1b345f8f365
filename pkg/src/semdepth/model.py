"""Shared data model: feature maps, text banks, bin partitions, depth maps, manifests.

All types are immutable after construction (arrays are frozen read-only copies),
so instances can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ArityMismatch, ChannelMismatch, ManifestError, ValidationError


def _frozen_array(values, dtype=np.float64, ndim: int | None = None) -> np.ndarray:
    arr = np.array(values, dtype=dtype, order="C", copy=True)
    if ndim is not None and arr.ndim != ndim:
        raise ValidationError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FeatureMap:
    """Dense per-patch visual embedding grid, shape (height_f, width_f, channels).

    One row/col position is one patch of the source image; the channel axis is
    the joint image-text embedding dimension.
    """

    data: np.ndarray
    source_id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "data", _frozen_array(self.data, ndim=3))
        if min(self.data.shape) < 1:
            raise ValidationError(f"feature map axes must all be >= 1, got {self.data.shape}")
        if not np.isfinite(self.data).all():
            raise ValidationError("feature map contains NaN or Inf")

    @property
    def height_f(self) -> int:
        return self.data.shape[0]

    @property
    def width_f(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]


@dataclass(frozen=True)
class TextBank:
    """K prompt embeddings, one row per semantic distance token.

    `template` is the prompt the rows were built from, with one `{}` slot for
    the token. Row order defines token order everywhere downstream.
    """

    tokens: tuple[str, ...]
    embeddings: np.ndarray
    template: str = "This object is {}"

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(str(t) for t in self.tokens))
        object.__setattr__(self, "embeddings", _frozen_array(self.embeddings, ndim=2))
        if len(self.tokens) < 1:
            raise ValidationError("a text bank needs at least one token")
        if self.embeddings.shape[0] != len(self.tokens):
            raise ArityMismatch(
                f"{len(self.tokens)} tokens but {self.embeddings.shape[0]} embedding rows"
            )
        if not np.isfinite(self.embeddings).all():
            raise ValidationError("text embeddings contain NaN or Inf")
        if (np.linalg.norm(self.embeddings, axis=1) == 0).any():
            raise ValidationError("text embeddings contain an all-zero row")

    @property
    def k(self) -> int:
        return len(self.tokens)

    @property
    def channels(self) -> int:
        return self.embeddings.shape[1]


@dataclass(frozen=True)
class BinPartition:
    """K quantified depth values (meters), one per semantic token.

    Strictly increasing so that "closer token -> smaller depth" stays auditable,
    even though the combination math itself does not need the ordering.
    """

    name: str
    bins: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "bins", _frozen_array(self.bins, ndim=1))
        if len(self.bins) < 1:
            raise ValidationError("a bin partition needs at least one depth value")
        if not np.isfinite(self.bins).all() or (self.bins <= 0).any():
            raise ValidationError(f"depth bins must be finite and > 0: {self.bins}")
        if (np.diff(self.bins) <= 0).any():
            raise ValidationError(f"depth bins must be strictly increasing: {self.bins}")

    @property
    def k(self) -> int:
        return len(self.bins)


@dataclass(frozen=True)
class DepthMap:
    """Per-pixel depth grid in meters. Pixels <= 0 or NaN are invalid."""

    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", _frozen_array(self.data, ndim=2))
        if min(self.data.shape) < 1:
            raise ValidationError(f"depth map axes must be >= 1, got {self.data.shape}")
        # +Inf would count as "valid" under the >0 rule but is not a depth.
        if np.isposinf(self.data).any():
            raise ValidationError("depth map contains +Inf")

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def valid(self) -> np.ndarray:
        """Boolean mask of pixels carrying a usable depth."""
        with np.errstate(invalid="ignore"):
            return np.isfinite(self.data) & (self.data > 0)


@dataclass(frozen=True)
class ManifestRecord:
    image_id: str
    features_path: str
    gt_path: str | None = None
    scene_class: str | None = None


@dataclass(frozen=True)
class Manifest:
    """Dataset index linking per-image features, ground truth, and scene class."""

    records: tuple[ManifestRecord, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        seen = set()
        for rec in self.records:
            if rec.image_id in seen:
                raise ManifestError(f"duplicate image_id {rec.image_id!r}")
            seen.add(rec.image_id)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def scene_classes(self) -> tuple[str, ...]:
        """Distinct scene classes present, in first-appearance order."""
        out = []
        for rec in self.records:
            if rec.scene_class is not None and rec.scene_class not in out:
                out.append(rec.scene_class)
        return tuple(out)


def validate_pairing(fm: FeatureMap, tb: TextBank, bp: BinPartition) -> None:
    """Check that a feature map, text bank, and bin partition can be combined.

    Raises ChannelMismatch if the embedding spaces differ, ArityMismatch if the
    token and bin counts differ.
    """
    if fm.channels != tb.channels:
        raise ChannelMismatch(
            f"feature map has {fm.channels} channels, text bank has {tb.channels}"
        )
    if tb.k != bp.k:
        raise ArityMismatch(f"text bank has {tb.k} tokens, partition has {bp.k} bins")
