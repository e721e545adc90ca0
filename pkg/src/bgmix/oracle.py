"""Naive scalar reference implementation used to certify the fast path.

Everything here is deliberately per-pixel Python: nested lists, scalar
loops, double-precision arithmetic, one explicit rounding rule. It consumes
the generator in exactly the documented draw order (see
docs/determinism.md), so its output must match the optimized pipeline
bit for bit — images and op logs. Any divergence is a release blocker.
"""

from __future__ import annotations

import math

import numpy as np

from .core import AugConfig, AugResult, BBox, CpmOp, Mode, Rect, SpmOp, validate_config
from .rng import SeededRng


def _to_rows(img: np.ndarray) -> list[list[list[int]]]:
    return [[[int(c) for c in px] for px in row] for row in img]


def _scalar_mask(rows, width: int, height: int, threshold: int) -> list[list[bool]]:
    bits = []
    for y in range(height):
        line = []
        for x in range(width):
            r, g, b = rows[y][x]
            line.append(min(r, g, b) < threshold)
        bits.append(line)
    return bits


def _scalar_fraction(bits, rect: Rect) -> float:
    count = 0
    for y in range(rect.y0, rect.y1):
        for x in range(rect.x0, rect.x1):
            if bits[y][x]:
                count += 1
    return count / (rect.w * rect.h)


def _rect_hits_box(rect: Rect, box: BBox) -> bool:
    return (rect.x0 < box.x + box.w and box.x < rect.x1
            and rect.y0 < box.y + box.h and box.y < rect.y1)


def _clip(x0: int, y0: int, w: int, h: int, width: int, height: int):
    cx0 = max(x0, 0)
    cy0 = max(y0, 0)
    cx1 = min(x0 + w, width)
    cy1 = min(y0 + h, height)
    if cx1 - cx0 < 1 or cy1 - cy0 < 1:
        return None
    return cx0, cy0, cx1 - cx0, cy1 - cy0


def _round_px(value: float) -> int:
    return min(255, max(0, math.floor(value + 0.5)))


def _patch_dims(rng: SeededRng, width: int, height: int, lo: float, hi: float):
    u_w = rng.uniform_range(lo, hi)
    u_h = rng.uniform_range(lo, hi)
    w = max(1, math.floor(u_w * width + 0.5))
    h = max(1, math.floor(u_h * height + 0.5))
    return w, h


def _naive_spm(rows, snapshot, gt: list[BBox], bits, cfg: AugConfig,
               rng: SeededRng, width: int, height: int) -> list[SpmOp]:
    ops: list[SpmOp] = []
    n = rng.randint(int(cfg.spm_patch_count.lo), int(cfg.spm_patch_count.hi))
    for _ in range(n):
        src = None
        for _attempt in range(cfg.max_sample_attempts):
            w, h = _patch_dims(rng, width, height,
                               cfg.spm_area_ratio.lo, cfg.spm_area_ratio.hi)
            x0 = rng.randint(0, width - w)
            y0 = rng.randint(0, height - h)
            cand = Rect(x0, y0, w, h)
            if any(_rect_hits_box(cand, b) for b in gt):
                continue
            if _scalar_fraction(bits, cand) < cfg.min_background_fraction:
                continue
            src = cand
            break
        if src is None:
            continue
        dx = rng.randint(-(width - 1), width - 1)
        dy = rng.randint(-(height - 1), height - 1)
        alpha = rng.uniform_range(cfg.spm_alpha.lo, cfg.spm_alpha.hi)
        dst_origin = (src.x0 + dx, src.y0 + dy)
        clipped = _clip(dst_origin[0], dst_origin[1], src.w, src.h, width, height)
        if clipped is None:
            continue
        cx0, cy0, cw, ch = clipped
        sx = src.x0 + (cx0 - dst_origin[0])
        sy = src.y0 + (cy0 - dst_origin[1])
        for v in range(ch):
            for u in range(cw):
                src_px = snapshot[sy + v][sx + u]
                dst_px = rows[cy0 + v][cx0 + u]
                rows[cy0 + v][cx0 + u] = [
                    _round_px(alpha * float(src_px[c]) + (1.0 - alpha) * float(dst_px[c]))
                    for c in range(3)
                ]
        ops.append(SpmOp(src, dst_origin, alpha))
    return ops


def _naive_cpm(rows, cfg: AugConfig, rng: SeededRng,
               width: int, height: int) -> list[CpmOp]:
    ops: list[CpmOp] = []
    m = rng.randint(int(cfg.cpm_patch_count.lo), int(cfg.cpm_patch_count.hi))
    for _ in range(m):
        w, h = _patch_dims(rng, width, height,
                           cfg.cpm_area_ratio.lo, cfg.cpm_area_ratio.hi)
        x0 = rng.randint(0, width - w)
        y0 = rng.randint(0, height - h)
        rect = Rect(x0, y0, w, h)
        color = (rng.randint(0, 255), rng.randint(0, 255), rng.randint(0, 255))
        alpha = rng.uniform_range(cfg.cpm_alpha.lo, cfg.cpm_alpha.hi)
        for y in range(rect.y0, rect.y1):
            for x in range(rect.x0, rect.x1):
                px = rows[y][x]
                rows[y][x] = [
                    _round_px((1.0 - alpha) * float(px[c]) + alpha * float(color[c]))
                    for c in range(3)
                ]
        ops.append(CpmOp(rect, color, alpha))
    return ops


def naive_background_mixup(img: np.ndarray, gt: list[BBox], cfg: AugConfig,
                           rng: SeededRng) -> AugResult:
    """Scalar re-derivation of the full pipeline; same contract, same draws."""
    validate_config(cfg)
    height, width = img.shape[:2]

    # Mode selection, same two-draw shape as the fast path.
    if rng.uniform01() >= cfg.apply_probability:
        mode = Mode.NONE
    else:
        v = rng.uniform01()
        w_spm, w_cpm, _ = cfg.mode_weights
        if v < w_spm:
            mode = Mode.SPM
        elif v < w_spm + w_cpm:
            mode = Mode.CPM
        else:
            mode = Mode.BOTH
    if mode is Mode.NONE:
        return AugResult(image=img.copy(), mode=mode)

    rows = _to_rows(img)
    spm_ops: list[SpmOp] = []
    cpm_ops: list[CpmOp] = []
    if mode in (Mode.SPM, Mode.BOTH):
        snapshot = [[list(px) for px in row] for row in rows]
        bits = _scalar_mask(rows, width, height, cfg.white_threshold)
        spm_ops = _naive_spm(rows, snapshot, gt, bits, cfg, rng, width, height)
    if mode in (Mode.CPM, Mode.BOTH):
        cpm_ops = _naive_cpm(rows, cfg, rng, width, height)

    out = np.array(rows, dtype=np.uint8)
    return AugResult(image=out, mode=mode, spm_ops=spm_ops, cpm_ops=cpm_ops)
