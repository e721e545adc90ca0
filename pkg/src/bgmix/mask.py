"""Threshold saliency mask separating content from near-white background.

X-ray scanners render empty conveyor regions near-white; a pixel counts as
"content" when any channel is dark enough (min(R,G,B) < white_threshold).
The mask rejects empty source regions during patch sampling.
"""

from __future__ import annotations

import numpy as np

from .core import Rect, check_image


def compute_mask(img: np.ndarray, white_threshold: int) -> np.ndarray:
    """Boolean (H, W) mask, True where the pixel is content (non-white).

    Pure and deterministic; raising the threshold never turns a True bit
    False.
    """
    check_image(img)
    if not 0 <= white_threshold <= 255:
        raise ValueError(f"white_threshold {white_threshold} outside [0, 255]")
    return img.min(axis=2) < white_threshold


def rect_content_fraction(mask: np.ndarray, r: Rect) -> float:
    """Fraction of content pixels inside r (exact integer count / area)."""
    h, w = mask.shape
    if r.x0 < 0 or r.y0 < 0 or r.x1 > w or r.y1 > h:
        raise ValueError(f"rect {r} not contained in {w}x{h} mask")
    count = int(mask[r.y0:r.y1, r.x0:r.x1].sum())
    return count / (r.w * r.h)
