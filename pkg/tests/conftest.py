import hashlib
import json
from pathlib import Path

import numpy as np
import pytest

from bgmix import save_image


@pytest.fixture
def rand_image():
    """Factory for deterministic random RGB fixtures."""
    def make(height=64, width=64, seed=0):
        g = np.random.default_rng(seed)
        return g.integers(0, 256, size=(height, width, 3), dtype=np.uint8)
    return make


@pytest.fixture
def two_box_fixture(rand_image):
    """64x64 image with two disjoint GT boxes, as used by the golden tests."""
    from bgmix import BBox
    img = rand_image(64, 64, seed=7)
    boxes = [BBox(4, 4, 16, 12, 1), BBox(40, 30, 20, 24, 2)]
    return img, boxes


def scan_like_image(size, seed):
    """Synthetic baggage scan: near-white canvas with translucent items."""
    g = np.random.default_rng(seed)
    img = np.full((size, size, 3), 250, dtype=np.float64)
    for _ in range(6):
        w, h = g.integers(size // 8, size // 2, size=2)
        x, y = g.integers(0, size - w), g.integers(0, size - h)
        color = g.integers(0, 200, size=3)
        alpha = g.uniform(0.3, 0.8)
        img[y:y + h, x:x + w] = (1 - alpha) * img[y:y + h, x:x + w] + alpha * color
    return img.astype(np.uint8)


@pytest.fixture
def coco_fixture(tmp_path, rand_image):
    """Write a small on-disk dataset: images dir + COCO-subset annotations."""
    def make(n_images=2, size=48, boxes_per_image=2, seed=11, subdir="ds",
             style="noise"):
        root = tmp_path / subdir
        img_dir = root / "images"
        img_dir.mkdir(parents=True)
        g = np.random.default_rng(seed)
        images, annotations = [], []
        ann_id = 1
        for i in range(n_images):
            name = f"scan_{i:03d}.png"
            if style == "scan":
                pixels = scan_like_image(size, seed + i)
            else:
                pixels = rand_image(size, size, seed=seed + i)
            save_image(pixels, img_dir / name)
            images.append({"id": i + 1, "file_name": name, "width": size, "height": size})
            for _ in range(boxes_per_image):
                w = int(g.integers(4, size // 2))
                h = int(g.integers(4, size // 2))
                x = int(g.integers(0, size - w))
                y = int(g.integers(0, size - h))
                annotations.append({"id": ann_id, "image_id": i + 1,
                                    "bbox": [x, y, w, h], "category_id": 1})
                ann_id += 1
        ann_path = root / "annotations.json"
        ann_path.write_text(json.dumps({
            "images": images,
            "annotations": annotations,
            "categories": [{"id": 1, "name": "blade"}],
        }))
        return root, img_dir, ann_path
    return make


def tree_hash(root: Path) -> str:
    """Order-independent digest of a directory tree (paths + contents)."""
    digest = hashlib.sha256()
    for path in sorted(p for p in Path(root).rglob("*") if p.is_file()):
        digest.update(str(path.relative_to(root)).encode())
        digest.update(path.read_bytes())
    return digest.hexdigest()
