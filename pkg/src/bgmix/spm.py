"""Self patch mixup: copy background patches, move them, alpha-blend them.

Source rects are sampled strictly outside every ground-truth box and must be
mostly content pixels; destinations may land anywhere (including over
foreground) and are clipped at the image border. Source pixels are always
read from the pristine input snapshot, never from partially blended output.
"""

from __future__ import annotations

import logging

import numpy as np

from .core import AugConfig, BBox, Rect, SpmOp, clip_rect, round_half_away
from .mask import rect_content_fraction
from .rng import SeededRng

log = logging.getLogger(__name__)


class DegenerateDstError(ValueError):
    """Destination rect clipped to nothing; callers treat this as a no-op."""


def _sample_patch_dims(rng: SeededRng, width: int, height: int,
                       ratio_lo: float, ratio_hi: float) -> tuple[int, int]:
    """Draw per-axis area ratios and scale to pixel dims (two uniform draws)."""
    u_w = rng.uniform_range(ratio_lo, ratio_hi)
    u_h = rng.uniform_range(ratio_lo, ratio_hi)
    w = max(1, round_half_away(u_w * width))
    h = max(1, round_half_away(u_h * height))
    return w, h


def sample_source_rect(rng: SeededRng, img_dims: tuple[int, int], gt: list[BBox],
                       mask: np.ndarray, cfg: AugConfig) -> Rect | None:
    """Rejection-sample a background source rect.

    img_dims is (width, height). Each attempt consumes four draws (two size
    ratios, two origin coordinates); a candidate is accepted when it is
    disjoint from every GT box and at least min_background_fraction of its
    pixels are content. Returns None after max_sample_attempts rejections.
    """
    width, height = img_dims
    for _ in range(cfg.max_sample_attempts):
        w, h = _sample_patch_dims(rng, width, height,
                                  cfg.spm_area_ratio.lo, cfg.spm_area_ratio.hi)
        x0 = rng.randint(0, width - w)
        y0 = rng.randint(0, height - h)
        rect = Rect(x0, y0, w, h)
        if any(rect.intersects_box(b) for b in gt):
            continue
        if rect_content_fraction(mask, rect) < cfg.min_background_fraction:
            continue
        return rect
    return None


def sample_offset(rng: SeededRng, img_dims: tuple[int, int]) -> tuple[int, int]:
    """Random patch shift: dx in [-W+1, W-1], dy in [-H+1, H-1] (two draws)."""
    width, height = img_dims
    dx = rng.randint(-(width - 1), width - 1)
    dy = rng.randint(-(height - 1), height - 1)
    return dx, dy


def _blend_patch_into(out: np.ndarray, source: np.ndarray, src: Rect,
                      dst_origin: tuple[int, int], alpha: float) -> Rect | None:
    """Blend source patch over `out` at dst_origin, clipping at the border.

    Reads source pixels from `source`, writes into `out` in place. Returns
    the effective (clipped) destination rect, or None if clipping emptied it.
    """
    height, width = out.shape[:2]
    dst = clip_rect(Rect(dst_origin[0], dst_origin[1], src.w, src.h), width, height)
    if dst is None:
        return None
    # The sub-rect of the source that survives destination clipping.
    sx = src.x0 + (dst.x0 - dst_origin[0])
    sy = src.y0 + (dst.y0 - dst_origin[1])
    src_block = source[sy:sy + dst.h, sx:sx + dst.w].astype(np.float64)
    dst_block = out[dst.y0:dst.y1, dst.x0:dst.x1].astype(np.float64)
    blended = np.floor(alpha * src_block + (1.0 - alpha) * dst_block + 0.5)
    out[dst.y0:dst.y1, dst.x0:dst.x1] = np.clip(blended, 0.0, 255.0).astype(np.uint8)
    return dst


def blend_spm_patch(img: np.ndarray, src: Rect, dst_origin: tuple[int, int],
                    alpha: float, source_image: np.ndarray | None = None) -> np.ndarray:
    """Blend one moved patch into a copy of img: out = alpha*patch + (1-alpha)*img.

    Per channel the result is round-half-away-from-zero of the convex blend,
    clamped to [0, 255]. Pixels outside the clipped destination are
    untouched. source_image overrides where patch pixels are read from
    (defaults to the unmodified input). Raises DegenerateDstError when the
    destination clips to nothing.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha {alpha} outside [0, 1]")
    height, width = img.shape[:2]
    if src.x0 < 0 or src.y0 < 0 or src.x1 > width or src.y1 > height:
        raise ValueError(f"source rect {src} not contained in {width}x{height} image")
    out = img.copy()
    source = img if source_image is None else source_image
    if _blend_patch_into(out, source, src, dst_origin, alpha) is None:
        raise DegenerateDstError(f"destination at {dst_origin} ({src.w}x{src.h}) clips to nothing")
    return out


def apply_spm(img: np.ndarray, gt: list[BBox], mask: np.ndarray,
              cfg: AugConfig, rng: SeededRng) -> tuple[np.ndarray, list[SpmOp]]:
    """Run the full self-patch pass: n patches sampled, moved, and blended.

    Patches blend sequentially over the evolving output but always read
    their source pixels from the input snapshot. Failed source sampling or
    fully clipped destinations skip the patch without error.
    """
    height, width = img.shape[:2]
    dims = (width, height)
    out = img.copy()
    ops: list[SpmOp] = []
    n = rng.randint(int(cfg.spm_patch_count.lo), int(cfg.spm_patch_count.hi))
    for i in range(n):
        src = sample_source_rect(rng, dims, gt, mask, cfg)
        if src is None:
            log.debug("spm patch %d/%d: source sampling exhausted, skipped", i + 1, n)
            continue
        dx, dy = sample_offset(rng, dims)
        alpha = rng.uniform_range(cfg.spm_alpha.lo, cfg.spm_alpha.hi)
        dst_origin = (src.x0 + dx, src.y0 + dy)
        if _blend_patch_into(out, img, src, dst_origin, alpha) is None:
            log.debug("spm patch %d/%d: destination clipped away, skipped", i + 1, n)
            continue
        ops.append(SpmOp(src, dst_origin, alpha))
    return out, ops
