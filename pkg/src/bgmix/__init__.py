"""Deterministic background-patch mixup augmentation for X-ray security imagery.

The library blends background texture patches (self patch mixup) and flat
random-color patches (color patch mixup) into detection training images
without touching annotations. Every draw comes from a documented seeded
generator, so outputs are bit-reproducible across runs, worker counts, and
implementations.
"""

from .core import (AugConfig, AugResult, BadWeightsError, BBox, ClosedRange,
                   ConfigError, CpmOp, Mode, OutOfDomainError, RangeInvertedError,
                   Rect, SpmOp, boxes_from_xywh, clip_rect, validate_config)
from .cpm import apply_cpm, blend_color_rect, sample_color, sample_cpm_rect
from .dataset_io import (Annotation, Category, Dataset, DatasetError,
                         DanglingRefError, DecodeError, ImageInfo, LoadReport,
                         MissingImageError, ParseError, load_dataset, load_image,
                         read_manifest, save_dataset, save_image, write_manifest)
from .mask import compute_mask, rect_content_fraction
from .oracle import naive_background_mixup
from .pipeline import background_mixup, choose_mode, derive_image_rng
from .rng import SeededRng
from .spm import (DegenerateDstError, apply_spm, blend_spm_patch, sample_offset,
                  sample_source_rect)

__version__ = "0.1.0"

__all__ = [
    "AugConfig", "AugResult", "Annotation", "BBox", "BadWeightsError", "Category",
    "ClosedRange", "ConfigError", "CpmOp", "DanglingRefError", "Dataset",
    "DatasetError", "DecodeError", "DegenerateDstError", "ImageInfo", "LoadReport",
    "MissingImageError", "Mode", "OutOfDomainError", "ParseError",
    "RangeInvertedError", "Rect", "SeededRng", "SpmOp", "apply_cpm", "apply_spm",
    "background_mixup", "blend_color_rect", "blend_spm_patch", "boxes_from_xywh",
    "choose_mode", "clip_rect", "compute_mask", "derive_image_rng", "load_dataset",
    "load_image", "naive_background_mixup", "read_manifest", "rect_content_fraction",
    "sample_color", "sample_cpm_rect", "sample_offset", "sample_source_rect",
    "save_dataset", "save_image", "validate_config", "write_manifest",
]
