"""The full augmentation pipeline and its reproducibility contract.

One call gates on apply_probability, picks self-patch / color-patch / both,
and returns the augmented image plus an op log that can regenerate it.
Per-image streams make batch output independent of scheduling.
"""

import collections
from pathlib import Path

import numpy as np

from bgmix import (AugConfig, BBox, Mode, background_mixup, derive_image_rng,
                   naive_background_mixup, save_image)

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

g = np.random.default_rng(5)
scan = np.full((192, 192, 3), 249, dtype=np.float64)
for _ in range(4):
    w, h = g.integers(30, 90, size=2)
    x, y = g.integers(0, 192 - w), g.integers(0, 192 - h)
    scan[y:y + h, x:x + w] = 0.5 * scan[y:y + h, x:x + w] + 0.5 * g.integers(0, 200, 3)
scan = scan.astype(np.uint8)
gt = [BBox(20, 20, 50, 40, category_id=1)]
cfg = AugConfig(apply_probability=1.0)

# --- per-image streams: seed + image index fully determine the output -----
master_seed = 31337
for index in range(3):
    result = background_mixup(scan, gt, cfg, derive_image_rng(master_seed, index))
    again = background_mixup(scan, gt, cfg, derive_image_rng(master_seed, index))
    assert np.array_equal(result.image, again.image), "same stream must reproduce"
    save_image(result.image, OUT / f"pipeline_idx{index}.png")
    print(f"image index {index}: mode={result.mode.value}, "
          f"{len(result.spm_ops)} patch ops, {len(result.cpm_ops)} color ops")

# --- the scalar reference path certifies the optimized one bit for bit ----
fast = background_mixup(scan, gt, cfg, derive_image_rng(master_seed, 0))
slow = naive_background_mixup(scan, gt, cfg, derive_image_rng(master_seed, 0))
assert np.array_equal(fast.image, slow.image)
assert fast.spm_ops == slow.spm_ops and fast.cpm_ops == slow.cpm_ops
print("optimized output matches the scalar reference implementation exactly")

# --- mode distribution follows apply_probability x mode_weights -----------
counts = collections.Counter()
for trial in range(5000):
    result = background_mixup(scan, gt, cfg, derive_image_rng(99, trial))
    counts[result.mode] += 1
print("mode frequencies over 5000 runs (weights are uniform thirds):")
for mode in (Mode.SPM, Mode.CPM, Mode.BOTH, Mode.NONE):
    print(f"  {mode.value:>4}: {counts[mode] / 5000:.3f}")
