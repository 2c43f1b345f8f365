"""Depth error metrics: rel, rmse, log10, and the nested delta threshold accuracies.

Masking keeps a pixel only when the ground truth is valid and inside
(min_depth, max_depth]; predictions are evaluated raw, with no scale or shift
alignment. In formulas below y is the prediction and y_hat the ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyMask, NonPositivePrediction, ShapeMismatch, ValidationError
from .model import DepthMap

DELTA_THRESHOLDS = (1.25, 1.25**2, 1.25**3)


@dataclass(frozen=True)
class EvalMask:
    """Valid-pixel rule: min_depth < gt <= max_depth, optionally inside a crop.

    `crop` is (top, bottom, left, right) in pixels, end-exclusive; None means
    the full frame.
    """

    min_depth: float = 0.0
    max_depth: float = 10.0
    crop: tuple[int, int, int, int] | None = None

    def __post_init__(self):
        if not (0 <= self.min_depth < self.max_depth):
            raise ValidationError(
                f"need 0 <= min_depth < max_depth, got ({self.min_depth}, {self.max_depth})"
            )

    def select(self, gt: DepthMap) -> np.ndarray:
        keep = gt.valid & (gt.data > self.min_depth) & (gt.data <= self.max_depth)
        if self.crop is not None:
            top, bottom, left, right = self.crop
            window = np.zeros_like(keep)
            window[top:bottom, left:right] = True
            keep &= window
        return keep


@dataclass(frozen=True)
class MetricReport:
    delta1: float
    delta2: float
    delta3: float
    rel: float
    log10: float
    rmse: float
    n_images: int
    n_pixels: int

    def __post_init__(self):
        values = (self.delta1, self.delta2, self.delta3, self.rel, self.log10, self.rmse)
        if not np.isfinite(values).all():
            raise ValidationError(f"metric report contains non-finite values: {values}")
        if not (0 <= self.delta1 <= self.delta2 <= self.delta3 <= 1):
            raise ValidationError(
                f"delta accuracies must be nested in [0, 1]: "
                f"{self.delta1}, {self.delta2}, {self.delta3}"
            )


@dataclass(frozen=True)
class _PixelSums:
    """Per-image masked-pixel accumulators; enough to rebuild any report."""

    n: int
    abs_rel: float
    sq_err: float
    abs_log10: float
    below: tuple[int, int, int]

    def report(self, n_images: int = 1) -> MetricReport:
        return MetricReport(
            delta1=self.below[0] / self.n,
            delta2=self.below[1] / self.n,
            delta3=self.below[2] / self.n,
            rel=self.abs_rel / self.n,
            log10=self.abs_log10 / self.n,
            rmse=float(np.sqrt(self.sq_err / self.n)),
            n_images=n_images,
            n_pixels=self.n,
        )


def _pixel_sums(pred: DepthMap, gt: DepthMap, mask: EvalMask) -> _PixelSums:
    if pred.data.shape != gt.data.shape:
        raise ShapeMismatch(f"pred {pred.data.shape} vs gt {gt.data.shape}")
    keep = mask.select(gt)
    if not keep.any():
        raise EmptyMask("no valid ground-truth pixels under the mask")
    y = pred.data[keep]
    y_hat = gt.data[keep]
    if not (np.isfinite(y).all() and (y > 0).all()):
        raise NonPositivePrediction("masked predictions must be finite and > 0 for log10")

    ratio = np.maximum(y / y_hat, y_hat / y)
    return _PixelSums(
        n=int(keep.sum()),
        abs_rel=float(np.sum(np.abs(y - y_hat) / y_hat)),
        sq_err=float(np.sum((y - y_hat) ** 2)),
        abs_log10=float(np.sum(np.abs(np.log10(y) - np.log10(y_hat)))),
        below=tuple(int(np.count_nonzero(ratio < thr)) for thr in DELTA_THRESHOLDS),
    )


def image_metrics(pred: DepthMap, gt: DepthMap, mask: EvalMask = EvalMask()) -> MetricReport:
    """Metrics over one image's masked pixels."""
    return _pixel_sums(pred, gt, mask).report()


def dataset_metrics(
    pairs: Iterable[tuple[DepthMap, DepthMap]],
    mask: EvalMask = EvalMask(),
    agg: str = "per-image",
) -> MetricReport:
    """Metrics over a dataset of (pred, gt) pairs.

    agg="per-image" (the comparison-protocol default) averages per-image
    metrics with equal weight per image; agg="pooled" treats every masked
    pixel of the dataset as one population.
    """
    if agg not in ("per-image", "pooled"):
        raise ValidationError(f"unknown aggregation {agg!r}")
    sums: list[_PixelSums] = []
    for i, (pred, gt) in enumerate(pairs):
        try:
            sums.append(_pixel_sums(pred, gt, mask))
        except (ShapeMismatch, EmptyMask, NonPositivePrediction) as e:
            raise type(e)(f"image {i}: {e}") from e
    if not sums:
        raise EmptyMask("empty dataset")

    if agg == "pooled":
        pooled = _PixelSums(
            n=sum(s.n for s in sums),
            abs_rel=sum(s.abs_rel for s in sums),
            sq_err=sum(s.sq_err for s in sums),
            abs_log10=sum(s.abs_log10 for s in sums),
            below=tuple(sum(s.below[j] for s in sums) for j in range(3)),
        )
        return pooled.report(n_images=len(sums))

    return average_reports([s.report() for s in sums])


def average_reports(reports: Sequence[MetricReport]) -> MetricReport:
    """Equal-weight mean of already-computed per-image reports."""
    if not reports:
        raise EmptyMask("no reports to average")
    mean = lambda field: float(np.mean([getattr(r, field) for r in reports]))
    return MetricReport(
        delta1=mean("delta1"),
        delta2=mean("delta2"),
        delta3=mean("delta3"),
        rel=mean("rel"),
        log10=mean("log10"),
        rmse=mean("rmse"),
        n_images=sum(r.n_images for r in reports),
        n_pixels=sum(r.n_pixels for r in reports),
    )
