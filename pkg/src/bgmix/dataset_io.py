"""COCO-subset dataset loading/saving, lossless image I/O, and manifests.

The annotation schema covers the keys "images", "annotations", and
"categories" with bbox rows [x, y, w, h]. Boxes that merely exceed image
bounds are clamped at load (and counted); boxes left degenerate by clamping
are dropped (and counted). Outputs are always PNG so augmented pixels
round-trip bit-exactly.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .core import check_image

MANIFEST_SCHEMA = "bgmix-manifest"
MANIFEST_VERSION = 1


class DatasetError(Exception):
    """Base class for dataset load failures."""


class ParseError(DatasetError):
    """Annotation file is malformed or violates the schema."""


class DanglingRefError(DatasetError):
    """An annotation references an image id that does not exist."""


class MissingImageError(DatasetError):
    """A referenced image file is absent under the image root."""


class DecodeError(DatasetError):
    """An image file exists but cannot be decoded."""


@dataclass
class ImageInfo:
    id: int
    file_name: str
    width: int
    height: int


@dataclass
class Annotation:
    id: int
    image_id: int
    bbox: tuple[float, float, float, float]
    category_id: int


@dataclass
class Category:
    id: int
    name: str


@dataclass
class LoadReport:
    clamped_boxes: int = 0
    dropped_annotations: int = 0


@dataclass
class Dataset:
    images: list[ImageInfo]
    annotations: list[Annotation]
    categories: list[Category]
    load_report: LoadReport = field(default_factory=LoadReport, compare=False)

    def annotations_for(self, image_id: int) -> list[Annotation]:
        return [a for a in self.annotations if a.image_id == image_id]


def _require(record: dict, key: str, context: str):
    if key not in record:
        raise ParseError(f"{context}: missing required key '{key}'")
    return record[key]


def _clamp_bbox(bbox, width: int, height: int):
    """Clamp a [x, y, w, h] box to the image; None if nothing remains."""
    x, y, w, h = (float(v) for v in bbox)
    x0 = min(max(x, 0.0), float(width))
    y0 = min(max(y, 0.0), float(height))
    x1 = min(max(x + w, 0.0), float(width))
    y1 = min(max(y + h, 0.0), float(height))
    if x1 - x0 <= 0 or y1 - y0 <= 0:
        return None
    return (x0, y0, x1 - x0, y1 - y0)


def load_dataset(ann_path: str | Path, image_root: str | Path | None = None) -> Dataset:
    """Parse and validate a COCO-subset annotation file.

    When image_root is given, every referenced file must exist under it.
    """
    ann_path = Path(ann_path)
    try:
        raw = json.loads(ann_path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise ParseError(f"annotation file not found: {ann_path}") from e
    except json.JSONDecodeError as e:
        raise ParseError(f"{ann_path} is not valid JSON: {e}") from e
    if not isinstance(raw, dict):
        raise ParseError(f"{ann_path}: top level must be a JSON object")

    images = []
    for rec in _require(raw, "images", str(ann_path)):
        images.append(ImageInfo(
            id=int(_require(rec, "id", "image record")),
            file_name=str(_require(rec, "file_name", "image record")),
            width=int(_require(rec, "width", "image record")),
            height=int(_require(rec, "height", "image record")),
        ))
    by_id = {im.id: im for im in images}
    if len(by_id) != len(images):
        raise ParseError(f"{ann_path}: duplicate image ids")

    if image_root is not None:
        root = Path(image_root)
        for im in images:
            if not (root / im.file_name).is_file():
                raise MissingImageError(f"{im.file_name} not found under {root}")

    report = LoadReport()
    annotations = []
    for rec in _require(raw, "annotations", str(ann_path)):
        image_id = int(_require(rec, "image_id", "annotation record"))
        if image_id not in by_id:
            raise DanglingRefError(f"annotation {rec.get('id')} references image {image_id}")
        im = by_id[image_id]
        bbox = _require(rec, "bbox", "annotation record")
        if not isinstance(bbox, (list, tuple)) or len(bbox) != 4:
            raise ParseError(f"annotation {rec.get('id')}: bbox must be [x, y, w, h]")
        clamped = _clamp_bbox(bbox, im.width, im.height)
        if clamped is None:
            report.dropped_annotations += 1
            continue
        if clamped != tuple(float(v) for v in bbox):
            report.clamped_boxes += 1
        annotations.append(Annotation(
            id=int(_require(rec, "id", "annotation record")),
            image_id=image_id,
            bbox=clamped,
            category_id=int(_require(rec, "category_id", "annotation record")),
        ))

    categories = []
    for rec in _require(raw, "categories", str(ann_path)):
        categories.append(Category(
            id=int(_require(rec, "id", "category record")),
            name=str(_require(rec, "name", "category record")),
        ))

    return Dataset(images=images, annotations=annotations, categories=categories,
                   load_report=report)


def save_dataset(ds: Dataset, out_ann_path: str | Path) -> None:
    """Write the dataset back out; load(save(ds)) == ds, ordering preserved."""
    payload = {
        "images": [
            {"id": im.id, "file_name": im.file_name, "width": im.width, "height": im.height}
            for im in ds.images
        ],
        "annotations": [
            {"id": a.id, "image_id": a.image_id, "bbox": list(a.bbox),
             "category_id": a.category_id}
            for a in ds.annotations
        ],
        "categories": [{"id": c.id, "name": c.name} for c in ds.categories],
    }
    Path(out_ann_path).write_text(
        json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")


def load_image(path: str | Path) -> np.ndarray:
    """Decode an image to (H, W, 3) uint8 RGB.

    Grayscale inputs replicate into all channels; 16-bit samples are
    truncated to their high byte (with a warning).
    """
    path = Path(path)
    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            if mode in ("I", "I;16", "I;16B", "I;16L", "I;16N"):
                warnings.warn(
                    f"{path.name}: >8-bit samples truncated to high byte", stacklevel=2)
                arr = np.asarray(im).astype(np.uint32)
                gray = (arr >> 8).astype(np.uint8)
                return np.ascontiguousarray(np.stack([gray] * 3, axis=2))
            if mode != "RGB":
                im = im.convert("RGB")
            return np.ascontiguousarray(np.asarray(im, dtype=np.uint8))
    except FileNotFoundError:
        raise
    except (UnidentifiedImageError, SyntaxError, ValueError, OSError) as e:
        raise DecodeError(f"cannot decode {path}: {e}") from e


def save_image(img: np.ndarray, path: str | Path) -> None:
    """Encode as PNG (lossless); save->load round-trips bit-exactly."""
    check_image(img)
    Image.fromarray(img, mode="RGB").save(Path(path), format="PNG")


def write_manifest(path: str | Path, records: list[dict], *,
                   seed: int, multiplier: int = 1, extra: dict | None = None) -> None:
    """Line-delimited JSON: one header record, then one record per image."""
    header = {"schema": MANIFEST_SCHEMA, "version": MANIFEST_VERSION,
              "seed": seed, "multiplier": multiplier}
    if extra:
        header.update(extra)
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps(header, ensure_ascii=False) + "\n")
        for rec in records:
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")


def read_manifest(path: str | Path) -> tuple[dict, list[dict]]:
    """Parse a manifest: (header, records). Raises ParseError on bad schema."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ParseError(f"{path}: empty manifest")
    header = json.loads(lines[0])
    if header.get("schema") != MANIFEST_SCHEMA:
        raise ParseError(f"{path}: unexpected manifest schema {header.get('schema')!r}")
    return header, [json.loads(line) for line in lines[1:] if line.strip()]
