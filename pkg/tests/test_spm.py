"""Self patch mixup: sampling, offsets, blending, and the full pass."""

import math

import numpy as np
import pytest

from bgmix import (AugConfig, BBox, ClosedRange, DegenerateDstError, Rect,
                   SeededRng, apply_spm, blend_spm_patch, compute_mask,
                   sample_offset, sample_source_rect)


def all_content_mask(w, h):
    return np.ones((h, w), dtype=bool)


def small_cfg(**kwargs):
    base = dict(apply_probability=1.0, spm_area_ratio=ClosedRange(0.1, 0.3))
    base.update(kwargs)
    return AugConfig(**base)


class TestSampleSourceRect:
    def test_gt_covering_image_yields_none(self):
        cfg = small_cfg()
        gt = [BBox(0, 0, 100, 100, 1)]
        rect = sample_source_rect(SeededRng(1, 0), (100, 100), gt,
                                  all_content_mask(100, 100), cfg)
        assert rect is None

    def test_forced_size_without_constraints(self):
        cfg = small_cfg(spm_area_ratio=ClosedRange(0.1, 0.1))
        rect = sample_source_rect(SeededRng(2, 0), (100, 100), [],
                                  all_content_mask(100, 100), cfg)
        assert rect is not None
        assert (rect.w, rect.h) == (10, 10)
        assert 0 <= rect.x0 and rect.x1 <= 100
        assert 0 <= rect.y0 and rect.y1 <= 100

    def test_rejects_gt_overlap_seed42(self):
        # Golden run: straight-line trace of the documented draw recipe
        # accepts (80, 35, 20, 20) on the first attempt.
        cfg = small_cfg(spm_area_ratio=ClosedRange(0.2, 0.2))
        gt = [BBox(0, 0, 50, 100, 1)]
        rect = sample_source_rect(SeededRng(42, 0), (100, 100), gt,
                                  all_content_mask(100, 100), cfg)
        assert rect == Rect(80, 35, 20, 20)
        assert rect.x0 >= 50
        assert not rect.intersects_box(gt[0])

    def test_all_white_mask_yields_none(self):
        cfg = small_cfg(min_background_fraction=0.5)
        rect = sample_source_rect(SeededRng(3, 0), (50, 50), [],
                                  np.zeros((50, 50), dtype=bool), cfg)
        assert rect is None

    def test_content_fraction_gate_respects_config(self):
        # A mask that is half content: fraction 1.0 requirement rejects any
        # rect touching the empty half, fraction 0.0 accepts everything.
        mask = np.zeros((40, 40), dtype=bool)
        mask[:, :20] = True
        strict = small_cfg(min_background_fraction=1.0,
                           spm_area_ratio=ClosedRange(0.5, 0.5))
        rect = sample_source_rect(SeededRng(4, 0), (40, 40), [], mask, strict)
        assert rect is None or not mask[rect.y0:rect.y1, rect.x0:rect.x1].__invert__().any()
        lax = small_cfg(min_background_fraction=0.0,
                        spm_area_ratio=ClosedRange(0.5, 0.5))
        assert sample_source_rect(SeededRng(4, 0), (40, 40), [], mask, lax) is not None

    def test_disjointness_over_many_draws(self):
        cfg = small_cfg()
        gt = [BBox(10, 10, 30, 30, 1), BBox(60, 55, 25, 35, 2)]
        mask = all_content_mask(100, 100)
        rng = SeededRng(5, 0)
        found = 0
        for _ in range(500):
            rect = sample_source_rect(rng, (100, 100), gt, mask, cfg)
            if rect is None:
                continue
            found += 1
            assert not any(rect.intersects_box(b) for b in gt)
        assert found > 400


class TestSampleOffset:
    def test_degenerate_one_pixel_image(self):
        rng = SeededRng(1, 0)
        assert sample_offset(rng, (1, 1)) == (0, 0)

    def test_offsets_within_range(self):
        rng = SeededRng(2, 0)
        for _ in range(2000):
            dx, dy = sample_offset(rng, (37, 21))
            assert -36 <= dx <= 36
            assert -20 <= dy <= 20

    def test_mean_absolute_offset_matches_closed_form(self):
        # E|dx| for dx uniform on {-99..99} is 2*(1+..+99)/199 = 9900/199.
        rng = SeededRng(3, 0)
        total = 0
        n = 100_000
        for _ in range(n):
            dx, _ = sample_offset(rng, (100, 100))
            total += abs(dx)
        assert abs(total / n - 9900 / 199) < 1.5


class TestBlendSpmPatch:
    def test_alpha_zero_is_identity(self, rand_image):
        img = rand_image(32, 32, seed=1)
        out = blend_spm_patch(img, Rect(0, 0, 8, 8), (20, 20), 0.0)
        assert np.array_equal(out, img)

    def test_alpha_one_copies_source(self, rand_image):
        img = rand_image(32, 32, seed=2)
        out = blend_spm_patch(img, Rect(0, 0, 8, 8), (20, 20), 1.0)
        assert np.array_equal(out[20:28, 20:28], img[0:8, 0:8])
        untouched = np.ones((32, 32), dtype=bool)
        untouched[20:28, 20:28] = False
        assert np.array_equal(out[untouched], img[untouched])

    def test_midpoint_blend_exact(self):
        img = np.empty((2, 1, 3), dtype=np.uint8)
        img[0] = 200
        img[1] = 100
        out = blend_spm_patch(img, Rect(0, 0, 1, 1), (0, 1), 0.5)
        assert (out[1] == 150).all()

    def test_half_value_rounds_away_from_zero(self):
        img = np.empty((2, 1, 3), dtype=np.uint8)
        img[0] = 201
        img[1] = 100
        out = blend_spm_patch(img, Rect(0, 0, 1, 1), (0, 1), 0.5)
        assert (out[1] == 151).all()   # 150.5 rounds up

    def test_matches_scalar_oracle_on_random_patches(self, rand_image):
        img = rand_image(24, 24, seed=3)
        g = np.random.default_rng(9)
        for _ in range(25):
            w, h = int(g.integers(1, 12)), int(g.integers(1, 12))
            src = Rect(int(g.integers(0, 24 - w)), int(g.integers(0, 24 - h)), w, h)
            dst = (int(g.integers(-5, 24)), int(g.integers(-5, 24)))
            alpha = float(g.uniform())
            try:
                out = blend_spm_patch(img, src, dst, alpha)
            except DegenerateDstError:
                continue
            for v in range(h):
                for u in range(w):
                    y, x = dst[1] + v, dst[0] + u
                    if not (0 <= y < 24 and 0 <= x < 24):
                        continue
                    for c in range(3):
                        s = float(img[src.y0 + v, src.x0 + u, c])
                        d = float(img[y, x, c])
                        expect = min(255, max(0, math.floor(alpha * s + (1 - alpha) * d + 0.5)))
                        assert out[y, x, c] == expect

    def test_clipped_destination_blends_partial_patch(self, rand_image):
        img = rand_image(16, 16, seed=4)
        out = blend_spm_patch(img, Rect(4, 4, 8, 8), (-4, 12), 1.0)
        # Only the bottom-left 4x4 survives: dst rows 12..16, cols 0..4,
        # reading the corresponding sub-rect of the source.
        assert np.array_equal(out[12:16, 0:4], img[4:8, 8:12])

    def test_fully_clipped_destination_raises(self, rand_image):
        img = rand_image(16, 16, seed=5)
        with pytest.raises(DegenerateDstError):
            blend_spm_patch(img, Rect(0, 0, 4, 4), (100, 100), 0.5)

    def test_rejects_bad_alpha_and_out_of_image_source(self, rand_image):
        img = rand_image(16, 16, seed=6)
        with pytest.raises(ValueError):
            blend_spm_patch(img, Rect(0, 0, 4, 4), (0, 0), 1.5)
        with pytest.raises(ValueError):
            blend_spm_patch(img, Rect(14, 14, 4, 4), (0, 0), 0.5)

    def test_input_image_is_not_mutated(self, rand_image):
        img = rand_image(16, 16, seed=7)
        before = img.copy()
        blend_spm_patch(img, Rect(0, 0, 8, 8), (4, 4), 0.7)
        assert np.array_equal(img, before)


class TestApplySpm:
    def test_zero_patch_count_is_identity(self, rand_image):
        img = rand_image(32, 32, seed=8)
        cfg = small_cfg(spm_patch_count=ClosedRange(0, 0))
        out, ops = apply_spm(img, [], all_content_mask(32, 32), cfg, SeededRng(1, 0))
        assert np.array_equal(out, img)
        assert ops == []

    def test_zero_alpha_leaves_pixels_unchanged(self, rand_image):
        img = rand_image(32, 32, seed=9)
        cfg = small_cfg(spm_alpha=ClosedRange(0.0, 0.0),
                        spm_patch_count=ClosedRange(3, 3))
        out, ops = apply_spm(img, [], all_content_mask(32, 32), cfg, SeededRng(2, 0))
        assert np.array_equal(out, img)
        assert all(op.alpha == 0.0 for op in ops)

    def test_sources_read_pristine_snapshot(self, rand_image):
        # With alpha=1 every blend is a copy; replaying the ops against the
        # original image must reproduce the output exactly.
        img = rand_image(48, 48, seed=10)
        cfg = small_cfg(spm_alpha=ClosedRange(1.0, 1.0),
                        spm_patch_count=ClosedRange(4, 4),
                        spm_area_ratio=ClosedRange(0.3, 0.6))
        out, ops = apply_spm(img, [], all_content_mask(48, 48), cfg, SeededRng(3, 0))
        replay = img.copy()
        for op in ops:
            dx0, dy0 = op.dst_origin
            for v in range(op.src.h):
                for u in range(op.src.w):
                    y, x = dy0 + v, dx0 + u
                    if 0 <= y < 48 and 0 <= x < 48:
                        replay[y, x] = img[op.src.y0 + v, op.src.x0 + u]
        assert np.array_equal(out, replay)

    def test_exhausted_sampling_skips_without_error(self, rand_image):
        img = rand_image(32, 32, seed=11)
        cfg = small_cfg(spm_patch_count=ClosedRange(2, 2), max_sample_attempts=3)
        gt = [BBox(0, 0, 32, 32, 1)]
        out, ops = apply_spm(img, gt, all_content_mask(32, 32), cfg, SeededRng(4, 0))
        assert ops == []
        assert np.array_equal(out, img)

    def test_gt_is_read_only_and_sources_disjoint(self, rand_image):
        img = rand_image(64, 64, seed=12)
        gt = [BBox(8, 8, 20, 20, 1), BBox(40, 36, 18, 22, 2)]
        cfg = small_cfg(spm_patch_count=ClosedRange(3, 3))
        mask = compute_mask(img, cfg.white_threshold)
        _, ops = apply_spm(img, gt, mask, cfg, SeededRng(5, 0))
        for op in ops:
            assert not any(op.src.intersects_box(b) for b in gt)

    def test_determinism(self, rand_image):
        img = rand_image(40, 40, seed=13)
        cfg = small_cfg(spm_patch_count=ClosedRange(2, 4))
        a_out, a_ops = apply_spm(img, [], all_content_mask(40, 40), cfg, SeededRng(6, 3))
        b_out, b_ops = apply_spm(img, [], all_content_mask(40, 40), cfg, SeededRng(6, 3))
        assert np.array_equal(a_out, b_out)
        assert a_ops == b_ops
