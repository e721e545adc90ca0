"""Color patch mixup: simulating material variation.

Overlays semi-transparent flat-color rectangles drawn from the full RGB
cube. No annotations are needed; this pass models how different materials
tint overlapping regions in transmission imaging.
"""

from pathlib import Path

import numpy as np

from bgmix import AugConfig, ClosedRange, SeededRng, apply_cpm, save_image

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

g = np.random.default_rng(11)
scan = np.full((256, 320, 3), 248, dtype=np.float64)
scan[80:200, 60:260] = 0.5 * scan[80:200, 60:260] + 0.5 * np.array((90, 140, 210))
scan = scan.astype(np.uint8)
save_image(scan, OUT / "cpm_before.png")

cfg = AugConfig(
    apply_probability=1.0,
    cpm_patch_count=ClosedRange(2, 4),
    cpm_alpha=ClosedRange(0.5, 0.7),       # stronger than the self-patch pass
    cpm_area_ratio=ClosedRange(0.05, 0.2),  # smaller patches work better here
)

for seed in (1, 2, 3):
    out, ops = apply_cpm(scan, cfg, SeededRng(seed=seed, stream_id=0))
    save_image(out, OUT / f"cpm_after_seed{seed}.png")
    summary = ", ".join(f"rgb{op.color}@{op.alpha:.2f}" for op in ops)
    print(f"seed {seed}: {len(ops)} color patches: {summary}")

print(f"wrote variants to {OUT}/cpm_after_seed*.png")
print("same seed always reproduces the same patches; different seeds differ")
