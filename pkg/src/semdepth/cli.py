"""Command-line surface.

Exit codes: 0 success, 2 input-format error, 3 validation error,
4 evaluation error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import ablation, io
from .baseline import RandomBaselineConfig, random_depth_map
from .errors import (
    EvaluationError,
    FormatError,
    ManifestError,
    MissingTextBank,
    SemDepthError,
    ValidationError,
)
from .metrics import EvalMask, dataset_metrics
from .model import BinPartition, Manifest
from .projection import Temperature, inspect_patch, predict

EXIT_FORMAT = 2
EXIT_VALIDATION = 3
EXIT_EVALUATION = 4


def _parse_size(text: str) -> tuple[int, int]:
    try:
        h, w = text.lower().split("x")
        return int(h), int(w)
    except ValueError:
        raise ValidationError(f"--out-size wants HxW (e.g. 416x512), got {text!r}") from None


def _parse_patch(text: str) -> tuple[int, int]:
    try:
        r, c = text.split(",")
        return int(r), int(c)
    except ValueError:
        raise ValidationError(f"--patch wants r,c (e.g. 6,8), got {text!r}") from None


def _parse_crop(text: str) -> tuple[int, int, int, int]:
    try:
        top, bottom, left, right = (int(v) for v in text.split(","))
        return top, bottom, left, right
    except ValueError:
        raise ValidationError(f"--crop wants top,bottom,left,right, got {text!r}") from None


def _resolve_bins(spec: str) -> BinPartition:
    """A preset name, or a JSON file holding {"name": ..., "bins": [...]}."""
    if spec in ablation.PRESET_PARTITIONS:
        return ablation.PRESET_PARTITIONS[spec]
    if not os.path.exists(spec):
        raise ValidationError(
            f"{spec!r} is neither a preset ({', '.join(ablation.PRESET_PARTITIONS)}) "
            f"nor a file"
        )
    obj = _load_json(spec)
    if isinstance(obj, list) and all(isinstance(v, (int, float)) for v in obj):
        name = os.path.splitext(os.path.basename(spec))[0]
        return BinPartition(name, obj)
    if isinstance(obj, dict) and "bins" in obj:
        return BinPartition(str(obj.get("name", "custom")), obj["bins"])
    raise FormatError(f"{spec}: expected a JSON bin list or an object with a 'bins' key")


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: not valid JSON: {e}") from e


def _load_partitions_file(path) -> tuple[BinPartition, ...]:
    obj = _load_json(path)
    if isinstance(obj, dict):
        obj = [obj]
    if not isinstance(obj, list):
        raise FormatError(f"{path}: expected a JSON array of partitions")
    out = []
    for entry in obj:
        if not isinstance(entry, dict) or "name" not in entry or "bins" not in entry:
            raise FormatError(f"{path}: each partition needs 'name' and 'bins'")
        out.append(BinPartition(str(entry["name"]), entry["bins"]))
    return tuple(out)


def _load_designs_file(path) -> ablation.PromptSweepConfig:
    obj = _load_json(path)
    template = ablation.PROMPT_TEMPLATE
    if isinstance(obj, dict):
        template = str(obj.get("template", template))
        obj = obj.get("designs")
    if not isinstance(obj, list):
        raise FormatError(f"{path}: expected a JSON array of designs")
    designs = []
    for entry in obj:
        if not isinstance(entry, dict) or "name" not in entry or "tokens" not in entry:
            raise FormatError(f"{path}: each design needs 'name' and 'tokens'")
        designs.append(ablation.PromptDesign(str(entry["name"]), entry["tokens"]))
    return ablation.PromptSweepConfig(tuple(designs), template=template)


def _eval_pairs(manifest: Manifest, pred_dir: str):
    """(pred, gt) per record; predictions live at <pred_dir>/<image_id>.dpm."""
    pairs = []
    for rec in manifest:
        pred_path = os.path.join(pred_dir, f"{rec.image_id}.dpm")
        if not os.path.exists(pred_path):
            raise ManifestError(f"no prediction for {rec.image_id!r} at {pred_path}")
        if rec.gt_path is None:
            raise EvaluationError(f"record {rec.image_id!r} has no ground truth")
        pairs.append((io.read_depth_file(pred_path), io.read_depth_file(rec.gt_path)))
    return pairs


# ---------------------------------------------------------------- subcommands


def _cmd_predict(args) -> int:
    fm = io.read_feature_map(args.features)
    tb = io.read_text_bank(args.text)
    bp = _resolve_bins(args.bins)
    out_h, out_w = _parse_size(args.out_size) if args.out_size else (None, None)
    dm = predict(fm, tb, bp, Temperature(args.temperature), out_h, out_w)
    io.write_depth_file(args.out, dm)
    print(f"wrote {args.out} ({dm.height}x{dm.width})")
    return 0


def _cmd_eval(args) -> int:
    manifest = io.load_manifest(args.manifest)
    mask = EvalMask(
        args.min_depth, args.max_depth, _parse_crop(args.crop) if args.crop else None
    )
    report = dataset_metrics(_eval_pairs(manifest, args.pred_dir), mask, agg=args.agg)
    io.write_report({"overall": report}, args.report)
    print(io.format_report({"overall": report}), end="")
    return 0


def _cmd_ablate_bins(args) -> int:
    manifest = io.load_manifest(args.manifest)
    tb = io.read_text_bank(args.text)
    partitions = (
        _load_partitions_file(args.partitions)
        if args.partitions
        else tuple(ablation.PRESET_PARTITIONS.values())
    )
    cfg = ablation.BinSweepConfig(partitions, class_filter=args.scene_class)
    table = ablation.run_bin_sweep(cfg, manifest, tb, Temperature(args.temperature))
    io.write_report(table, args.report)
    print(io.format_report(table), end="")
    return 0


def _cmd_ablate_prompts(args) -> int:
    manifest = io.load_manifest(args.manifest)
    bp = _resolve_bins(args.bins)
    cfg = (
        _load_designs_file(args.designs) if args.designs else ablation.preset_prompt_sweep()
    )
    banks = {}
    for design in cfg.designs:
        path = os.path.join(args.text_dir, f"{design.name}.dce")
        if not os.path.exists(path):
            raise MissingTextBank(f"design {design.name!r}: no text bank at {path}")
        banks[design.name] = io.read_text_bank(path)
    table = ablation.run_prompt_sweep(
        cfg, manifest, banks, bp, Temperature(args.temperature)
    )
    io.write_report(table, args.report)
    print(io.format_report(table), end="")
    return 0


def _cmd_baseline(args) -> int:
    manifest = io.load_manifest(args.manifest)
    cfg = RandomBaselineConfig(seed=args.seed, low=args.low, high=args.high)
    pairs = []
    for rec in manifest:
        if rec.gt_path is None:
            raise EvaluationError(f"record {rec.image_id!r} has no ground truth")
        gt = io.read_depth_file(rec.gt_path)
        pairs.append((random_depth_map(cfg, rec.image_id, gt.height, gt.width), gt))
    report = dataset_metrics(pairs, EvalMask(args.low, args.high), agg=args.agg)
    io.write_report({"baseline": report}, args.report)
    print(io.format_report({"baseline": report}), end="")
    return 0


def _cmd_inspect(args) -> int:
    fm = io.read_feature_map(args.features)
    tb = io.read_text_bank(args.text)
    bp = _resolve_bins(args.bins)
    row, col = _parse_patch(args.patch)
    responses = inspect_patch(fm, tb, bp, Temperature(args.temperature), row, col)
    width = max(len(r.token) for r in responses)
    print(f"patch ({row},{col}) of {fm.height_f}x{fm.width_f} [{fm.source_id}]")
    print(f"{'token':<{width}}  similarity   weight  bin_m  contribution_m")
    for r in responses:
        print(
            f"{r.token:<{width}}  {r.similarity:10.6f}  {r.weight:7.4f}  "
            f"{r.bin:5.2f}  {r.contribution:14.6f}"
        )
    print(f"{'depth':<{width}}  {sum(r.contribution for r in responses):43.6f}")
    return 0


def _cmd_export_pgm(args) -> int:
    dm = io.read_depth_file(args.in_path)
    io.export_pgm(dm, args.out, max_depth=args.max_depth)
    print(f"wrote {args.out} ({dm.width}x{dm.height}, 16-bit)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semdepth",
        description="Zero-shot depth from patch-to-language similarity: "
        "prediction, evaluation, ablations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("predict", help="project features onto depth bins")
    p.add_argument("--features", required=True, help="feature-map container (.dce)")
    p.add_argument("--text", required=True, help="text-bank container (.dce)")
    p.add_argument("--bins", default="original", help="preset name or JSON file")
    p.add_argument("--temperature", type=float, default=0.1)
    p.add_argument("--out-size", default=None, help="HxW pixels (default: patch grid)")
    p.add_argument("--out", required=True, help="output depth file (.dpm)")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("eval", help="score predictions against ground truth")
    p.add_argument("--manifest", required=True)
    p.add_argument("--pred-dir", required=True, help="directory of <image_id>.dpm files")
    p.add_argument("--min-depth", type=float, default=0.0)
    p.add_argument("--max-depth", type=float, default=10.0)
    p.add_argument("--agg", choices=("per-image", "pooled"), default="per-image")
    p.add_argument("--crop", default=None, help="top,bottom,left,right pixel window")
    p.add_argument("--report", required=True, help="output report path")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("ablate-bins", help="sweep bin partitions")
    p.add_argument("--manifest", required=True)
    p.add_argument("--text", required=True, help="text-bank container (.dce)")
    p.add_argument("--partitions", default=None, help="JSON partitions file (default: presets)")
    p.add_argument("--class", dest="scene_class", default="all", help="scene class or 'all'")
    p.add_argument("--temperature", type=float, default=0.1)
    p.add_argument("--report", required=True)
    p.set_defaults(func=_cmd_ablate_bins)

    p = sub.add_parser("ablate-prompts", help="sweep prompt designs")
    p.add_argument("--manifest", required=True)
    p.add_argument("--text-dir", required=True, help="directory of <design>.dce banks")
    p.add_argument("--bins", default="original", help="preset name or JSON file")
    p.add_argument("--designs", default=None, help="JSON designs file (default: presets)")
    p.add_argument("--temperature", type=float, default=0.1)
    p.add_argument("--report", required=True)
    p.set_defaults(func=_cmd_ablate_prompts)

    p = sub.add_parser("baseline", help="random uniform lower bound")
    p.add_argument("--manifest", required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--low", type=float, default=0.0)
    p.add_argument("--high", type=float, default=10.0)
    p.add_argument("--agg", choices=("per-image", "pooled"), default="per-image")
    p.add_argument("--report", required=True)
    p.set_defaults(func=_cmd_baseline)

    p = sub.add_parser("inspect", help="per-token breakdown of one patch")
    p.add_argument("--features", required=True)
    p.add_argument("--text", required=True)
    p.add_argument("--bins", default="original")
    p.add_argument("--temperature", type=float, default=0.1)
    p.add_argument("--patch", required=True, help="r,c patch coordinates")
    p.set_defaults(func=_cmd_inspect)

    p = sub.add_parser("export-pgm", help="render a depth file as 16-bit PGM")
    p.add_argument("--in", dest="in_path", required=True, help="depth file (.dpm)")
    p.add_argument("--max-depth", type=float, default=10.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_export_pgm)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FormatError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FORMAT
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except EvaluationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_EVALUATION
    except SemDepthError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FORMAT


if __name__ == "__main__":
    sys.exit(main())
