"""Top-level augmentation entry point.

Gates on apply_probability, picks one of {self-patch, color-patch, both},
runs the chosen passes, and returns the augmented image with its op log.
Annotations are never modified; labels pass through untouched.
"""

from __future__ import annotations

import numpy as np

from .core import AugConfig, AugResult, BBox, Mode, check_image, validate_config
from .cpm import apply_cpm
from .mask import compute_mask
from .rng import SeededRng
from .spm import apply_spm


def choose_mode(rng: SeededRng, cfg: AugConfig) -> Mode:
    """Gate draw, then (if augmenting) a weighted choice over the three modes.

    Consumes one draw when the gate rejects, two when it accepts.
    """
    if rng.uniform01() >= cfg.apply_probability:
        return Mode.NONE
    v = rng.uniform01()
    w_spm, w_cpm, _ = cfg.mode_weights
    if v < w_spm:
        return Mode.SPM
    if v < w_spm + w_cpm:
        return Mode.CPM
    return Mode.BOTH


def derive_image_rng(master_seed: int, image_index: int) -> SeededRng:
    """Per-image generator: stream_id = image_index.

    Batch output is therefore a pure function of (seed, index), independent
    of worker count and scheduling.
    """
    return SeededRng(master_seed, stream_id=image_index)


def background_mixup(img: np.ndarray, gt: list[BBox], cfg: AugConfig,
                     rng: SeededRng) -> AugResult:
    """Apply the composite augmentation to one image.

    The input array is never mutated; the result always carries a fresh
    buffer of the same shape. Mode NONE returns a bit-identical copy with
    empty op lists. Sampling failures degrade to skipped ops, never errors.
    """
    check_image(img)
    validate_config(cfg)
    mode = choose_mode(rng, cfg)
    if mode is Mode.NONE:
        return AugResult(image=img.copy(), mode=mode)

    spm_ops = []
    cpm_ops = []
    out = img
    if mode in (Mode.SPM, Mode.BOTH):
        mask = compute_mask(img, cfg.white_threshold)
        out, spm_ops = apply_spm(out, gt, mask, cfg, rng)
    if mode in (Mode.CPM, Mode.BOTH):
        out, cpm_ops = apply_cpm(out, cfg, rng)
    return AugResult(image=out, mode=mode, spm_ops=spm_ops, cpm_ops=cpm_ops)
