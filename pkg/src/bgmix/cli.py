"""Batch command-line frontend.

Subcommands: `augment` (whole COCO-style dataset, multi-process), `preview`
(variants of one image), `verify` (optimized-vs-naive equivalence trials).
Progress and skip reports go to stderr; `--json` emits a machine-readable
summary record on stdout. Output bytes are independent of --workers.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import sys
from pathlib import Path

import numpy as np

from .core import (AugConfig, BBox, ClosedRange, ConfigError, boxes_from_xywh,
                   validate_config)
from .dataset_io import (Annotation, Dataset, DatasetError, DecodeError, ImageInfo,
                         load_dataset, load_image, save_dataset, save_image,
                         write_manifest)
from .oracle import naive_background_mixup
from .pipeline import background_mixup, derive_image_rng


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON config file")
    p.add_argument("--apply-probability", type=float)
    p.add_argument("--spm-patch-count", nargs=2, type=int, metavar=("LO", "HI"))
    p.add_argument("--cpm-patch-count", nargs=2, type=int, metavar=("LO", "HI"))
    p.add_argument("--spm-alpha", nargs=2, type=float, metavar=("LO", "HI"))
    p.add_argument("--cpm-alpha", nargs=2, type=float, metavar=("LO", "HI"))
    p.add_argument("--spm-area-ratio", nargs=2, type=float, metavar=("LO", "HI"))
    p.add_argument("--cpm-area-ratio", nargs=2, type=float, metavar=("LO", "HI"))
    p.add_argument("--white-threshold", type=int)
    p.add_argument("--min-background-fraction", type=float)
    p.add_argument("--max-sample-attempts", type=int)
    p.add_argument("--mode-weights", nargs=3, type=float, metavar=("SPM", "CPM", "BOTH"))


_RANGE_FLAGS = ("spm_patch_count", "cpm_patch_count", "spm_alpha", "cpm_alpha",
                "spm_area_ratio", "cpm_area_ratio")


def build_config(args: argparse.Namespace) -> AugConfig:
    """Config file values first, then CLI flag overrides, then validation."""
    cfg = AugConfig.load(args.config) if args.config else AugConfig()
    overrides = {}
    for name in ("apply_probability", "white_threshold", "min_background_fraction",
                 "max_sample_attempts"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    for name in _RANGE_FLAGS:
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = ClosedRange(float(value[0]), float(value[1]))
    if getattr(args, "mode_weights", None) is not None:
        overrides["mode_weights"] = tuple(args.mode_weights)
    if overrides:
        cfg = cfg.with_overrides(**overrides)
    return validate_config(cfg)


def _augment_task(task) -> dict:
    """One (image, variant) unit of work; must stay picklable for the pool."""
    image_path, out_path, boxes, seed, stream_id, cfg = task
    try:
        img = load_image(image_path)
    except DecodeError as e:
        return {"source": Path(image_path).name, "error": str(e)}
    result = background_mixup(img, boxes_from_xywh(boxes), cfg, derive_image_rng(seed, stream_id))
    save_image(result.image, out_path)
    return {
        "source": Path(image_path).name,
        "output": Path(out_path).name,
        "seed": seed,
        "image_index": stream_id,
        **result.op_log(),
    }


def cmd_augment(args: argparse.Namespace) -> int:
    try:
        cfg = build_config(args)
    except ConfigError as e:
        print(f"error: invalid config: {e}", file=sys.stderr)
        return 2

    for flag in ("images", "annotations", "out"):
        if getattr(args, flag) is None:
            print(f"error: --{flag} is required", file=sys.stderr)
            return 3
    try:
        ds = load_dataset(args.annotations, image_root=args.images)
    except DatasetError as e:
        print(f"error: cannot load dataset: {e}", file=sys.stderr)
        return 3

    out_dir = Path(args.out)
    img_dir = out_dir / "images"
    img_dir.mkdir(parents=True, exist_ok=True)

    k = args.multiplier
    anns_by_image: dict[int, list[Annotation]] = {im.id: [] for im in ds.images}
    for a in ds.annotations:
        anns_by_image[a.image_id].append(a)

    tasks = []
    for src_index, im in enumerate(ds.images):
        boxes = [a.bbox for a in anns_by_image[im.id]]
        for variant in range(k):
            stream_id = src_index * k + variant
            out_name = f"{Path(im.file_name).stem}_v{variant}.png"
            tasks.append((str(Path(args.images) / im.file_name), str(img_dir / out_name),
                          boxes, args.seed, stream_id, cfg))

    if args.workers <= 1:
        results = [_augment_task(t) for t in tasks]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_augment_task, tasks))

    # Assemble the remapped dataset and manifest in task order (worker-invariant).
    new_images: list[ImageInfo] = []
    new_annotations: list[Annotation] = []
    records: list[dict] = []
    skipped = 0
    next_ann_id = 1
    for task, rec in zip(tasks, results):
        if "error" in rec:
            skipped += 1
            print(f"skip: {rec['source']}: {rec['error']}", file=sys.stderr)
            continue
        _, out_path, _, _, stream_id, _ = task
        src_index, variant = divmod(stream_id, k)
        im = ds.images[src_index]
        new_id = im.id * k + variant
        new_images.append(ImageInfo(id=new_id, file_name=Path(out_path).name,
                                    width=im.width, height=im.height))
        for a in anns_by_image[im.id]:
            new_annotations.append(Annotation(id=next_ann_id, image_id=new_id,
                                              bbox=a.bbox, category_id=a.category_id))
            next_ann_id += 1
        records.append(rec)

    out_ds = Dataset(images=new_images, annotations=new_annotations,
                     categories=ds.categories)
    save_dataset(out_ds, out_dir / "annotations.json")
    write_manifest(out_dir / "manifest.jsonl", records, seed=args.seed, multiplier=k,
                   extra={"config": cfg.to_dict()})

    summary = {"sources": len(ds.images), "emitted": len(records),
               "skipped": skipped, "out": str(out_dir), "seed": args.seed,
               "multiplier": k}
    print(f"augmented {summary['emitted']} images "
          f"({skipped} skipped) -> {out_dir}", file=sys.stderr)
    if args.json:
        print(json.dumps(summary))
    if skipped and args.strict:
        return 1
    return 0


def cmd_preview(args: argparse.Namespace) -> int:
    try:
        cfg = build_config(args)
    except ConfigError as e:
        print(f"error: invalid config: {e}", file=sys.stderr)
        return 2

    for flag in ("image", "out"):
        if getattr(args, flag) is None:
            print(f"error: --{flag} is required", file=sys.stderr)
            return 3
    try:
        img = load_image(args.image)
    except (DecodeError, FileNotFoundError) as e:
        print(f"error: cannot load image: {e}", file=sys.stderr)
        return 3
    try:
        boxes = boxes_from_xywh(json.loads(args.boxes)) if args.boxes else []
    except (json.JSONDecodeError, TypeError, IndexError, ValueError) as e:
        print(f"error: --boxes must be JSON [[x,y,w,h], ...]: {e}", file=sys.stderr)
        return 3

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_image(img, out_dir / "original.png")
    for i in range(args.count):
        stream_id = args.image_index + i
        result = background_mixup(img, boxes, cfg, derive_image_rng(args.seed, stream_id))
        name = f"variant_{i:03d}.png"
        save_image(result.image, out_dir / name)
        print(json.dumps({"variant": i, "output": name, "seed": args.seed,
                          "image_index": stream_id, **result.op_log()}))
    print(f"wrote original + {args.count} variants -> {out_dir}", file=sys.stderr)
    return 0


def _random_trial_config(g: np.random.Generator) -> AugConfig:
    def frange(lo, hi):
        a, b = sorted(g.uniform(lo, hi, size=2))
        return ClosedRange(float(a), float(b))

    def irange(lo, hi):
        a, b = sorted(int(v) for v in g.integers(lo, hi + 1, size=2))
        return ClosedRange(a, b)

    w = g.uniform(0.05, 1.0, size=3)
    w = w / w.sum()
    return AugConfig(
        apply_probability=1.0 if g.uniform() < 0.5 else float(g.uniform()),
        spm_patch_count=irange(0, 4),
        cpm_patch_count=irange(0, 4),
        spm_alpha=frange(0.0, 1.0),
        cpm_alpha=frange(0.0, 1.0),
        spm_area_ratio=frange(0.05, 1.0),
        cpm_area_ratio=frange(0.05, 1.0),
        white_threshold=int(g.integers(0, 256)),
        min_background_fraction=float(g.uniform(0.0, 1.0)),
        max_sample_attempts=int(g.integers(1, 11)),
        mode_weights=tuple(float(x) for x in w),
    )


def random_trial_inputs(g: np.random.Generator, max_dim: int):
    """One randomized (image, gt, config) triple for equivalence testing."""
    h = int(g.integers(1, max_dim + 1))
    w = int(g.integers(1, max_dim + 1))
    img = g.integers(0, 256, size=(h, w, 3), dtype=np.uint8)
    boxes = []
    for _ in range(int(g.integers(0, 5))):
        bw = int(g.integers(1, w + 1))
        bh = int(g.integers(1, h + 1))
        x = int(g.integers(0, w - bw + 1))
        y = int(g.integers(0, h - bh + 1))
        boxes.append(BBox(x, y, bw, bh))
    return img, boxes, _random_trial_config(g)


def run_equivalence_trials(trials: int, max_dim: int, seed: int):
    """Compare optimized vs naive on randomized triples; returns divergences."""
    divergences = []
    for t in range(trials):
        g = np.random.default_rng((seed, t))
        img, boxes, cfg = random_trial_inputs(g, max_dim)
        fast = background_mixup(img, boxes, cfg, derive_image_rng(seed, t))
        slow = naive_background_mixup(img, boxes, cfg, derive_image_rng(seed, t))
        if fast.mode is not slow.mode:
            divergences.append({"trial": t, "kind": "mode",
                                "fast": fast.mode.value, "slow": slow.mode.value})
            continue
        if fast.spm_ops != slow.spm_ops or fast.cpm_ops != slow.cpm_ops:
            divergences.append({"trial": t, "kind": "op_log",
                                "fast": [op.to_dict() for op in fast.spm_ops + fast.cpm_ops],
                                "slow": [op.to_dict() for op in slow.spm_ops + slow.cpm_ops]})
            continue
        if not np.array_equal(fast.image, slow.image):
            y, x, c = (int(v) for v in np.argwhere(fast.image != slow.image)[0])
            divergences.append({"trial": t, "kind": "pixel", "y": y, "x": x, "channel": c,
                                "fast": int(fast.image[y, x, c]),
                                "slow": int(slow.image[y, x, c])})
    return divergences


def cmd_verify(args: argparse.Namespace) -> int:
    if args.trials == 0:
        print("warning: no trials requested", file=sys.stderr)
        return 0
    divergences = run_equivalence_trials(args.trials, args.max_dim, args.seed)
    if not divergences:
        print(f"verify: {args.trials} trials, all bit-equal", file=sys.stderr)
        return 0
    first = divergences[0]
    print(f"verify: {len(divergences)}/{args.trials} trials diverged; first:",
          file=sys.stderr)
    print(json.dumps(first, indent=2), file=sys.stderr)
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bgmix",
                                     description="Background patch mixup augmentation")
    sub = parser.add_subparsers(dest="command", required=True)

    p_aug = sub.add_parser("augment", help="augment a COCO-style dataset")
    p_aug.add_argument("--images", type=Path, help="source image directory")
    p_aug.add_argument("--annotations", type=Path, help="COCO-subset JSON file")
    p_aug.add_argument("--out", type=Path, help="output directory")
    p_aug.add_argument("--seed", type=int, default=0)
    p_aug.add_argument("--workers", type=int, default=1)
    p_aug.add_argument("--multiplier", type=int, default=1,
                       help="augmented variants per source image")
    p_aug.add_argument("--strict", action="store_true",
                       help="nonzero exit if any image was skipped")
    p_aug.add_argument("--json", action="store_true",
                       help="machine-readable summary on stdout")
    _add_config_flags(p_aug)
    p_aug.set_defaults(func=cmd_augment)

    p_prev = sub.add_parser("preview", help="augment one image several times")
    p_prev.add_argument("--image", type=Path, help="input image file")
    p_prev.add_argument("--out", type=Path, help="output directory")
    p_prev.add_argument("--seed", type=int, default=0)
    p_prev.add_argument("--count", type=int, default=4)
    p_prev.add_argument("--boxes", help="inline GT boxes as JSON [[x,y,w,h], ...]")
    p_prev.add_argument("--image-index", type=int, default=0,
                        help="stream id of the first variant")
    _add_config_flags(p_prev)
    p_prev.set_defaults(func=cmd_preview)

    p_ver = sub.add_parser("verify", help="optimized-vs-reference equivalence trials")
    p_ver.add_argument("--trials", type=int, default=200)
    p_ver.add_argument("--max-dim", type=int, default=96)
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
