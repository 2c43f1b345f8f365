# Evaluate exported real-image features against their ground truth.
#
# Expects a directory produced by the encoder exporter: manifest.jsonl plus
# feature containers, depth files, and a text bank. Runs the depth projection
# with one bin partition and prints/writes the metric report. Point
# SEMDEPTH_NYU_DIR at the same directory to unlock the full-dataset
# acceptance tests.

import argparse
from pathlib import Path

from semdepth import (
    BinSweepConfig,
    EvalMask,
    PRESET_PARTITIONS,
    Temperature,
    format_report,
    load_manifest,
    read_text_bank,
    run_bin_sweep,
    write_report,
)


def parse_crop(text):
    top, bottom, left, right = (int(v) for v in text.split(","))
    return top, bottom, left, right


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data", required=True, help="exported dataset directory")
    parser.add_argument("--text", default=None, help="text bank (default <data>/text_bank.dce)")
    parser.add_argument("--partition", default="original", choices=sorted(PRESET_PARTITIONS))
    parser.add_argument("--temperature", type=float, default=0.1)
    parser.add_argument("--min-depth", type=float, default=0.0)
    parser.add_argument("--max-depth", type=float, default=10.0)
    parser.add_argument("--crop", default=None, help="top,bottom,left,right eval window")
    parser.add_argument("--class", dest="scene_class", default="all")
    parser.add_argument("--report", required=True)
    args = parser.parse_args()

    data = Path(args.data)
    manifest = load_manifest(data / "manifest.jsonl")
    tb = read_text_bank(args.text if args.text else data / "text_bank.dce")
    mask = EvalMask(
        args.min_depth, args.max_depth, parse_crop(args.crop) if args.crop else None
    )
    cfg = BinSweepConfig(
        partitions=(PRESET_PARTITIONS[args.partition],), class_filter=args.scene_class
    )
    table = run_bin_sweep(cfg, manifest, tb, Temperature(args.temperature), mask)
    write_report(table, args.report)
    print(format_report(table), end="")
    print(f"report: {args.report}")


if __name__ == "__main__":
    main()
