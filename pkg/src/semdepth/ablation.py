"""Sweep machinery: bin-partition sweeps, prompt-design sweeps, depth histograms.

Rows of a sweep are independent and ordered by config order. Bin sweeps compute
each image's weight grid once and reuse it across partitions, which is exact:
neither the similarity nor the softmax depends on the bin values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ArityMismatch,
    EmptyClassFilter,
    EvaluationError,
    MissingTextBank,
    ValidationError,
)
from .io import read_depth_file, read_feature_map
from .metrics import EvalMask, MetricReport, average_reports, image_metrics
from .model import BinPartition, Manifest, ManifestRecord, TextBank
from .projection import (
    Temperature,
    combine_bins,
    cosine_similarity,
    patch_to_pixel,
    predict,
    temperature_softmax,
)

PROMPT_TEMPLATE = "This object is {}"

# Built-in bin partitions; "original" is the shared default, the rest are the
# per-scene alternatives swept against it.
PRESET_PARTITIONS: dict[str, BinPartition] = {
    p.name: p
    for p in (
        BinPartition("original", [1.00, 1.50, 2.00, 2.25, 2.50, 2.75, 3.00]),
        BinPartition("class-dependent-1", [1.00, 2.00, 2.25, 2.50, 2.75, 3.00, 4.00]),
        BinPartition("class-dependent-2", [1.00, 1.50, 2.00, 2.50, 3.00, 3.50, 4.00]),
        BinPartition("class-dependent-3", [1.00, 1.25, 1.50, 1.75, 2.00, 2.25, 2.50]),
        BinPartition("class-dependent-4", [2.00, 2.50, 3.00, 3.25, 3.50, 3.75, 4.00]),
    )
}

# Built-in prompt designs (semantic distance token lists, near to far).
PRESET_PROMPTS: dict[str, tuple[str, ...]] = {
    "original": (
        "giant",
        "extremely close",
        "close",
        "not in distance",
        "a little remote",
        "far",
        "unseen",
    ),
    "prompt-1": ("extremely close", "close", "middle", "a little far", "far", "quite far", "unseen"),
    "prompt-2": (
        "extremely close",
        "very close",
        "close",
        "a little close",
        "a little far",
        "far",
        "unseen",
    ),
    "prompt-3": (
        "giant",
        "close",
        "a little close",
        "not in distance",
        "a bit remote",
        "far",
        "unseen",
    ),
}


@dataclass(frozen=True)
class BinSweepConfig:
    partitions: tuple[BinPartition, ...]
    class_filter: str = "all"

    def __post_init__(self):
        object.__setattr__(self, "partitions", tuple(self.partitions))
        if not self.partitions:
            raise ValidationError("a bin sweep needs at least one partition")
        names = [p.name for p in self.partitions]
        if len(set(names)) != len(names):
            raise ValidationError(f"partition names must be unique: {names}")


@dataclass(frozen=True)
class PromptDesign:
    name: str
    tokens: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(str(t) for t in self.tokens))
        if not self.tokens:
            raise ValidationError(f"design {self.name!r} has no tokens")


@dataclass(frozen=True)
class PromptSweepConfig:
    designs: tuple[PromptDesign, ...]
    template: str = PROMPT_TEMPLATE

    def __post_init__(self):
        object.__setattr__(self, "designs", tuple(self.designs))
        if not self.designs:
            raise ValidationError("a prompt sweep needs at least one design")
        names = [d.name for d in self.designs]
        if len(set(names)) != len(names):
            raise ValidationError(f"design names must be unique: {names}")
        ks = {len(d.tokens) for d in self.designs}
        if len(ks) > 1:
            raise ValidationError(f"designs disagree on token count: {sorted(ks)}")


def preset_prompt_sweep() -> PromptSweepConfig:
    return PromptSweepConfig(
        tuple(PromptDesign(name, tokens) for name, tokens in PRESET_PROMPTS.items())
    )


def preset_bin_sweep(class_filter: str = "all") -> BinSweepConfig:
    return BinSweepConfig(tuple(PRESET_PARTITIONS.values()), class_filter)


def filter_records(manifest: Manifest, class_filter: str) -> tuple[ManifestRecord, ...]:
    """Records whose scene_class matches; "all" passes everything through."""
    if class_filter == "all":
        records = tuple(manifest)
    else:
        records = tuple(r for r in manifest if r.scene_class == class_filter)
    if not records:
        raise EmptyClassFilter(f"no manifest records for class {class_filter!r}")
    return records


def _load_eval_pair(rec: ManifestRecord):
    if rec.gt_path is None:
        raise EvaluationError(f"record {rec.image_id!r} has no ground truth")
    return read_feature_map(rec.features_path), read_depth_file(rec.gt_path)


def run_bin_sweep(
    cfg: BinSweepConfig,
    manifest: Manifest,
    tb: TextBank,
    t: Temperature = Temperature(),
    mask: EvalMask = EvalMask(),
    reuse: bool = True,
) -> dict[str, MetricReport]:
    """One MetricReport per partition over the class-filtered manifest.

    reuse=False recomputes similarities for every partition; it exists to prove
    the cached path bit-identical and has no other use.
    """
    for p in cfg.partitions:
        if p.k != tb.k:
            raise ArityMismatch(f"partition {p.name!r} has {p.k} bins for {tb.k} tokens")
    records = filter_records(manifest, cfg.class_filter)

    per_partition: dict[str, list[MetricReport]] = {p.name: [] for p in cfg.partitions}
    for rec in records:
        fm, gt = _load_eval_pair(rec)
        if reuse:
            wg = temperature_softmax(cosine_similarity(fm, tb), t)
            for p in cfg.partitions:
                pred = patch_to_pixel(combine_bins(wg, p), gt.height, gt.width)
                per_partition[p.name].append(image_metrics(pred, gt, mask))
        else:
            for p in cfg.partitions:
                pred = predict(fm, tb, p, t, gt.height, gt.width)
                per_partition[p.name].append(image_metrics(pred, gt, mask))
    return {name: average_reports(reports) for name, reports in per_partition.items()}


def run_prompt_sweep(
    cfg: PromptSweepConfig,
    manifest: Manifest,
    text_banks: dict[str, TextBank],
    bp: BinPartition,
    t: Temperature = Temperature(),
    mask: EvalMask = EvalMask(),
    class_filter: str = "all",
) -> dict[str, MetricReport]:
    """One MetricReport per prompt design, each using its own text bank."""
    for design in cfg.designs:
        if design.name not in text_banks:
            raise MissingTextBank(f"no text bank supplied for design {design.name!r}")
        bank = text_banks[design.name]
        if bank.tokens != design.tokens:
            raise ValidationError(
                f"text bank for {design.name!r} encodes {bank.tokens}, "
                f"design declares {design.tokens}"
            )
    records = filter_records(manifest, class_filter)

    table: dict[str, MetricReport] = {}
    for design in cfg.designs:
        bank = text_banks[design.name]
        reports = []
        for rec in records:
            fm, gt = _load_eval_pair(rec)
            pred = predict(fm, bank, bp, t, gt.height, gt.width)
            reports.append(image_metrics(pred, gt, mask))
        table[design.name] = average_reports(reports)
    return table


def depth_histogram(
    manifest: Manifest, scene_class: str, bin_edges
) -> np.ndarray:
    """Histogram of all valid ground-truth pixels of one scene class.

    Values outside [first, last] edge are counted in the boundary bins, so the
    counts always sum to the class's valid-pixel total.
    """
    edges = np.asarray(bin_edges, dtype=np.float64)
    if edges.ndim != 1 or len(edges) < 2 or (np.diff(edges) <= 0).any():
        raise ValidationError(f"bin edges must be >= 2 strictly increasing values: {edges}")
    records = filter_records(manifest, scene_class)
    records = tuple(r for r in records if r.gt_path is not None)
    if not records:
        raise EmptyClassFilter(f"no ground truth for class {scene_class!r}")

    counts = np.zeros(len(edges) - 1, dtype=np.int64)
    for rec in records:
        gt = read_depth_file(rec.gt_path)
        values = np.clip(gt.data[gt.valid], edges[0], edges[-1])
        counts += np.histogram(values, bins=edges)[0]
    return counts
