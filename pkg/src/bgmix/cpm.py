"""Color patch mixup: blend flat random-color rectangles over the image.

Simulates material variation by overlaying semi-transparent patches whose
colors are drawn uniformly from the full RGB cube. Needs no annotations;
rects are sampled fully in-bounds so no clipping is involved.
"""

from __future__ import annotations

import numpy as np

from .core import AugConfig, CpmOp, Rect
from .rng import SeededRng
from .spm import _sample_patch_dims


def sample_color(rng: SeededRng) -> tuple[int, int, int]:
    """Independent uniform channels over 0..255 (three draws, R then G then B)."""
    return (rng.randint(0, 255), rng.randint(0, 255), rng.randint(0, 255))


def sample_cpm_rect(rng: SeededRng, img_dims: tuple[int, int], cfg: AugConfig) -> Rect:
    """Sample an in-bounds rect (four draws); no mask or GT constraint."""
    width, height = img_dims
    w, h = _sample_patch_dims(rng, width, height,
                              cfg.cpm_area_ratio.lo, cfg.cpm_area_ratio.hi)
    x0 = rng.randint(0, width - w)
    y0 = rng.randint(0, height - h)
    return Rect(x0, y0, w, h)


def _blend_color_into(out: np.ndarray, rect: Rect, color: tuple[int, int, int],
                      alpha: float) -> None:
    block = out[rect.y0:rect.y1, rect.x0:rect.x1].astype(np.float64)
    color_arr = np.array(color, dtype=np.float64)
    blended = np.floor((1.0 - alpha) * block + alpha * color_arr + 0.5)
    out[rect.y0:rect.y1, rect.x0:rect.x1] = np.clip(blended, 0.0, 255.0).astype(np.uint8)


def blend_color_rect(img: np.ndarray, rect: Rect, color: tuple[int, int, int],
                     alpha: float) -> np.ndarray:
    """Blend a flat color over a copy of img: out = (1-alpha)*img + alpha*color.

    Per channel the result is round-half-away-from-zero, clamped to
    [0, 255]; pixels outside the rect are untouched.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha {alpha} outside [0, 1]")
    height, width = img.shape[:2]
    if rect.x0 < 0 or rect.y0 < 0 or rect.x1 > width or rect.y1 > height:
        raise ValueError(f"rect {rect} not contained in {width}x{height} image")
    out = img.copy()
    _blend_color_into(out, rect, color, alpha)
    return out


def apply_cpm(img: np.ndarray, cfg: AugConfig, rng: SeededRng) -> tuple[np.ndarray, list[CpmOp]]:
    """Run the full color-patch pass: m flat-color rects blended sequentially.

    Later patches blend over earlier ones (there is no source region to
    snapshot). Never reads annotations.
    """
    height, width = img.shape[:2]
    dims = (width, height)
    out = img.copy()
    ops: list[CpmOp] = []
    m = rng.randint(int(cfg.cpm_patch_count.lo), int(cfg.cpm_patch_count.hi))
    for _ in range(m):
        rect = sample_cpm_rect(rng, dims, cfg)
        color = sample_color(rng)
        alpha = rng.uniform_range(cfg.cpm_alpha.lo, cfg.cpm_alpha.hi)
        _blend_color_into(out, rect, color, alpha)
        ops.append(CpmOp(rect, color, alpha))
    return out, ops
