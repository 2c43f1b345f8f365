"""Core projection: similarity -> temperature softmax -> weighted bin combination.

Every operation here is a pure function of immutable inputs; patches and images
can be evaluated in parallel with no coordination, and results never depend on
scheduling. All arithmetic is double precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ArityMismatch,
    ChannelMismatch,
    IndexOutOfRange,
    ShapeError,
    ValidationError,
    ZeroNormVector,
)
from .model import (
    BinPartition,
    DepthMap,
    FeatureMap,
    TextBank,
    _frozen_array,
    validate_pairing,
)

COSINE_SLACK = 1e-6  # rounding allowance on the [-1, 1] cosine range


@dataclass(frozen=True)
class Temperature:
    """Softmax temperature; smaller values sharpen toward the argmax token."""

    tau: float = 0.1

    def __post_init__(self):
        if not (self.tau > 0 and np.isfinite(self.tau)):
            raise ValidationError(f"temperature must be a positive finite real: {self.tau}")


@dataclass(frozen=True)
class SimilarityGrid:
    """Per-patch cosine scores against each token, shape (height_f, width_f, k)."""

    scores: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "scores", _frozen_array(self.scores, ndim=3))
        lo, hi = self.scores.min(), self.scores.max()
        if not np.isfinite([lo, hi]).all() or lo < -1 - COSINE_SLACK or hi > 1 + COSINE_SLACK:
            raise ValidationError(f"cosine scores escape [-1, 1] (min {lo}, max {hi})")

    @property
    def height_f(self) -> int:
        return self.scores.shape[0]

    @property
    def width_f(self) -> int:
        return self.scores.shape[1]

    @property
    def k(self) -> int:
        return self.scores.shape[2]


@dataclass(frozen=True)
class WeightGrid:
    """Per-patch convex combination weights over tokens, same shape as the scores."""

    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "weights", _frozen_array(self.weights, ndim=3))
        if (self.weights < 0).any():
            raise ValidationError("combination weights must be non-negative")
        sums = self.weights.sum(axis=2)
        if np.abs(sums - 1.0).max() > 1e-6:
            raise ValidationError("per-patch weights must sum to 1 within 1e-6")

    @property
    def height_f(self) -> int:
        return self.weights.shape[0]

    @property
    def width_f(self) -> int:
        return self.weights.shape[1]

    @property
    def k(self) -> int:
        return self.weights.shape[2]


@dataclass(frozen=True)
class TokenResponse:
    """One token's share of a single patch prediction."""

    token: str
    similarity: float
    weight: float
    bin: float
    contribution: float


def cosine_similarity(fm: FeatureMap, tb: TextBank) -> SimilarityGrid:
    """Cosine similarity of every patch embedding against every token embedding.

    scores[r, c, k] = <fm[r, c], tb[k]> / (||fm[r, c]|| * ||tb[k]||)
    """
    if fm.channels != tb.channels:
        raise ChannelMismatch(
            f"feature map has {fm.channels} channels, text bank has {tb.channels}"
        )
    patch_norms = np.linalg.norm(fm.data, axis=2)
    if (patch_norms == 0).any():
        raise ZeroNormVector("a patch embedding is all zeros; cosine is undefined")
    token_norms = np.linalg.norm(tb.embeddings, axis=1)
    if (token_norms == 0).any():
        raise ZeroNormVector("a token embedding is all zeros; cosine is undefined")

    dots = fm.data @ tb.embeddings.T  # (Hf, Wf, K)
    scores = dots / (patch_norms[:, :, None] * token_norms[None, None, :])
    # cancel the <= 1 ulp excursions past +-1 so the grid invariant is exact
    np.clip(scores, -1.0, 1.0, out=scores)
    return SimilarityGrid(scores)


def temperature_softmax(sg: SimilarityGrid, t: Temperature) -> WeightGrid:
    """Per-patch softmax of scores / tau, in max-subtracted stable form."""
    z = sg.scores / t.tau
    z = z - z.max(axis=2, keepdims=True)
    e = np.exp(z)
    return WeightGrid(e / e.sum(axis=2, keepdims=True))


def combine_bins(wg: WeightGrid, bp: BinPartition | np.ndarray) -> np.ndarray:
    """Patch depth as the weighted sum of bin values, shape (height_f, width_f).

    Contributions are accumulated in token-index order; the result is clamped
    to [min(bins), max(bins)] to keep the convex-combination bound exact under
    floating-point rounding. `bp` may be a raw positive depth array when a
    non-canonical bin ordering is wanted (token-order experiments).
    """
    bins = bp.bins if isinstance(bp, BinPartition) else np.asarray(bp, dtype=np.float64)
    if bins.ndim != 1:
        raise ValidationError(f"bins must be one-dimensional, got shape {bins.shape}")
    if not np.isfinite(bins).all() or (bins <= 0).any():
        raise ValidationError(f"depth bins must be finite and > 0: {bins}")
    if wg.k != len(bins):
        raise ArityMismatch(f"weight grid has {wg.k} tokens, partition has {len(bins)} bins")
    out = np.zeros((wg.height_f, wg.width_f), dtype=np.float64)
    for k in range(len(bins)):
        out += wg.weights[:, :, k] * bins[k]
    np.clip(out, bins.min(), bins.max(), out=out)
    return out


def patch_to_pixel(patch_depths: np.ndarray, out_height: int, out_width: int) -> DepthMap:
    """Expand a patch-depth grid to pixels; pixel (r, c) copies its owning patch.

    The owning patch is (floor(r * height_f / out_height),
    floor(c * width_f / out_width)), which reduces to plain block replication
    when the output divides evenly.
    """
    patch_depths = np.asarray(patch_depths, dtype=np.float64)
    hf, wf = patch_depths.shape
    if out_height < hf or out_width < wf:
        raise ShapeError(
            f"output {out_height}x{out_width} is smaller than the patch grid {hf}x{wf}"
        )
    rows = (np.arange(out_height, dtype=np.int64) * hf) // out_height
    cols = (np.arange(out_width, dtype=np.int64) * wf) // out_width
    return DepthMap(patch_depths[np.ix_(rows, cols)])


def predict(
    fm: FeatureMap,
    tb: TextBank,
    bp: BinPartition,
    t: Temperature = Temperature(),
    out_height: int | None = None,
    out_width: int | None = None,
) -> DepthMap:
    """Full pipeline: similarity, temperature softmax, bin combination, expansion.

    Defaults to the patch grid's own size when no output size is given.
    """
    validate_pairing(fm, tb, bp)
    sg = cosine_similarity(fm, tb)
    wg = temperature_softmax(sg, t)
    depths = combine_bins(wg, bp)
    if out_height is None:
        out_height = fm.height_f
    if out_width is None:
        out_width = fm.width_f
    return patch_to_pixel(depths, out_height, out_width)


def inspect_patch(
    fm: FeatureMap,
    tb: TextBank,
    bp: BinPartition,
    t: Temperature,
    patch_row: int,
    patch_col: int,
) -> list[TokenResponse]:
    """Per-token breakdown of one patch: similarity, weight, bin, contribution.

    The contributions sum to the patch's predicted depth.
    """
    validate_pairing(fm, tb, bp)
    if not (0 <= patch_row < fm.height_f and 0 <= patch_col < fm.width_f):
        raise IndexOutOfRange(
            f"patch ({patch_row}, {patch_col}) outside grid {fm.height_f}x{fm.width_f}"
        )
    sg = cosine_similarity(fm, tb)
    wg = temperature_softmax(sg, t)
    return [
        TokenResponse(
            token=tb.tokens[k],
            similarity=float(sg.scores[patch_row, patch_col, k]),
            weight=float(wg.weights[patch_row, patch_col, k]),
            bin=float(bp.bins[k]),
            contribution=float(wg.weights[patch_row, patch_col, k] * bp.bins[k]),
        )
        for k in range(tb.k)
    ]
