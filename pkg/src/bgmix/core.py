"""Core domain types: geometry, configuration, and augmentation results.

Images are plain numpy arrays of shape (H, W, 3), dtype uint8, channel order
R,G,B. All types here are immutable values; rectangles use half-open pixel
semantics ([x0, x0+w) x [y0, y0+h)) so clipping and disjointness tests are
exact.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

_WEIGHT_SUM_TOL = 1e-9


class ConfigError(ValueError):
    """Base class for configuration validation failures."""


class RangeInvertedError(ConfigError):
    """A ClosedRange has lo > hi."""


class OutOfDomainError(ConfigError):
    """A config value lies outside its documented domain."""


class BadWeightsError(ConfigError):
    """Mode weights are negative or do not sum to 1."""


def check_image(img: np.ndarray) -> np.ndarray:
    """Validate an RGB image buffer and return it unchanged."""
    if not isinstance(img, np.ndarray):
        raise TypeError(f"image must be a numpy array, got {type(img).__name__}")
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"image must have shape (H, W, 3), got {img.shape}")
    if img.dtype != np.uint8:
        raise ValueError(f"image dtype must be uint8, got {img.dtype}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError(f"image must be at least 1x1, got {img.shape}")
    return img


@dataclass(frozen=True)
class BBox:
    """Axis-aligned ground-truth box in pixel coordinates (x, y, w, h)."""

    x: float
    y: float
    w: float
    h: float
    category_id: int = 0

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"bbox must have positive extent, got w={self.w}, h={self.h}")


@dataclass(frozen=True)
class Rect:
    """Integer rectangle with half-open extent [x0, x0+w) x [y0, y0+h)."""

    x0: int
    y0: int
    w: int
    h: int

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise ValueError(f"rect must be at least 1x1, got w={self.w}, h={self.h}")

    @property
    def x1(self) -> int:
        return self.x0 + self.w

    @property
    def y1(self) -> int:
        return self.y0 + self.h

    def intersects_box(self, box: BBox) -> bool:
        """True if this rect overlaps the (half-open) area of a BBox."""
        return (
            self.x0 < box.x + box.w
            and box.x < self.x1
            and self.y0 < box.y + box.h
            and box.y < self.y1
        )


def clip_rect(r: Rect, width: int, height: int) -> Rect | None:
    """Intersect a rect with the image rectangle; None if empty."""
    x0 = max(r.x0, 0)
    y0 = max(r.y0, 0)
    x1 = min(r.x0 + r.w, width)
    y1 = min(r.y0 + r.h, height)
    if x1 - x0 < 1 or y1 - y0 < 1:
        return None
    return Rect(x0, y0, x1 - x0, y1 - y0)


@dataclass(frozen=True)
class ClosedRange:
    """Inclusive [lo, hi] interval."""

    lo: float
    hi: float

    def validate(self, name: str, *, domain_lo: float, domain_hi: float,
                 lo_exclusive: bool = False, integral: bool = False) -> None:
        if self.lo > self.hi:
            raise RangeInvertedError(f"{name}: lo {self.lo} > hi {self.hi}")
        if self.lo < domain_lo or (lo_exclusive and self.lo <= domain_lo):
            bracket = "(" if lo_exclusive else "["
            raise OutOfDomainError(
                f"{name}: lo {self.lo} outside domain {bracket}{domain_lo}, {domain_hi}]")
        if self.hi > domain_hi:
            raise OutOfDomainError(f"{name}: hi {self.hi} > {domain_hi}")
        if integral and not (float(self.lo).is_integer() and float(self.hi).is_integer()):
            raise OutOfDomainError(f"{name}: bounds must be integers, got [{self.lo}, {self.hi}]")


def _as_range(value) -> ClosedRange:
    if isinstance(value, ClosedRange):
        return value
    lo, hi = value
    return ClosedRange(float(lo), float(hi))


@dataclass(frozen=True)
class AugConfig:
    """All augmentation hyperparameters.

    Ranges serialize to two-element arrays; mode_weights to a three-element
    array ordered (self-patch, color-patch, both). Defaults follow the
    qualitative ablation findings: self-patch blends are more opaque toward
    the original image and cover a larger area range than color patches.
    """

    apply_probability: float = 0.5
    spm_patch_count: ClosedRange = ClosedRange(1, 3)
    cpm_patch_count: ClosedRange = ClosedRange(1, 3)
    spm_alpha: ClosedRange = ClosedRange(0.3, 0.5)
    cpm_alpha: ClosedRange = ClosedRange(0.5, 0.7)
    spm_area_ratio: ClosedRange = ClosedRange(0.1, 0.4)
    cpm_area_ratio: ClosedRange = ClosedRange(0.05, 0.2)
    white_threshold: int = 240
    min_background_fraction: float = 0.5
    max_sample_attempts: int = 50
    mode_weights: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)

    def __post_init__(self):
        # Accept bare 2-tuples/lists for the range fields.
        for name in ("spm_patch_count", "cpm_patch_count", "spm_alpha",
                     "cpm_alpha", "spm_area_ratio", "cpm_area_ratio"):
            object.__setattr__(self, name, _as_range(getattr(self, name)))
        object.__setattr__(self, "mode_weights", tuple(float(w) for w in self.mode_weights))

    def to_dict(self) -> dict:
        return {
            "apply_probability": self.apply_probability,
            "spm_patch_count": [self.spm_patch_count.lo, self.spm_patch_count.hi],
            "cpm_patch_count": [self.cpm_patch_count.lo, self.cpm_patch_count.hi],
            "spm_alpha": [self.spm_alpha.lo, self.spm_alpha.hi],
            "cpm_alpha": [self.cpm_alpha.lo, self.cpm_alpha.hi],
            "spm_area_ratio": [self.spm_area_ratio.lo, self.spm_area_ratio.hi],
            "cpm_area_ratio": [self.cpm_area_ratio.lo, self.cpm_area_ratio.hi],
            "white_threshold": self.white_threshold,
            "min_background_fraction": self.min_background_fraction,
            "max_sample_attempts": self.max_sample_attempts,
            "mode_weights": list(self.mode_weights),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AugConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(data)
        if "mode_weights" in kwargs:
            kwargs["mode_weights"] = tuple(kwargs["mode_weights"])
        if "white_threshold" in kwargs:
            kwargs["white_threshold"] = int(kwargs["white_threshold"])
        if "max_sample_attempts" in kwargs:
            kwargs["max_sample_attempts"] = int(kwargs["max_sample_attempts"])
        return cls(**kwargs)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "AugConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigError(f"config file {path} is not valid JSON: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"config file {path} must hold a JSON object")
        return cls.from_dict(data)

    def with_overrides(self, **kwargs) -> "AugConfig":
        return replace(self, **kwargs)


def validate_config(cfg: AugConfig) -> AugConfig:
    """Check every config invariant; returns cfg unchanged if all hold."""
    if not 0.0 <= cfg.apply_probability <= 1.0:
        raise OutOfDomainError(f"apply_probability {cfg.apply_probability} outside [0, 1]")
    cfg.spm_patch_count.validate("spm_patch_count", domain_lo=0, domain_hi=math.inf, integral=True)
    cfg.cpm_patch_count.validate("cpm_patch_count", domain_lo=0, domain_hi=math.inf, integral=True)
    cfg.spm_alpha.validate("spm_alpha", domain_lo=0.0, domain_hi=1.0)
    cfg.cpm_alpha.validate("cpm_alpha", domain_lo=0.0, domain_hi=1.0)
    cfg.spm_area_ratio.validate("spm_area_ratio", domain_lo=0.0, domain_hi=1.0, lo_exclusive=True)
    cfg.cpm_area_ratio.validate("cpm_area_ratio", domain_lo=0.0, domain_hi=1.0, lo_exclusive=True)
    if not isinstance(cfg.white_threshold, int) or not 0 <= cfg.white_threshold <= 255:
        raise OutOfDomainError(f"white_threshold {cfg.white_threshold} outside [0, 255]")
    if not 0.0 <= cfg.min_background_fraction <= 1.0:
        raise OutOfDomainError(
            f"min_background_fraction {cfg.min_background_fraction} outside [0, 1]")
    if not isinstance(cfg.max_sample_attempts, int) or cfg.max_sample_attempts < 1:
        raise OutOfDomainError(f"max_sample_attempts {cfg.max_sample_attempts} must be >= 1")
    if len(cfg.mode_weights) != 3:
        raise BadWeightsError(f"mode_weights needs 3 entries, got {len(cfg.mode_weights)}")
    if any(w < 0 for w in cfg.mode_weights):
        raise BadWeightsError(f"mode_weights must be non-negative, got {cfg.mode_weights}")
    if abs(sum(cfg.mode_weights) - 1.0) > _WEIGHT_SUM_TOL:
        raise BadWeightsError(
            f"mode_weights sum to {sum(cfg.mode_weights)}, expected 1 within {_WEIGHT_SUM_TOL}")
    return cfg


class Mode(enum.Enum):
    """Which augmentation ran; BOTH applies self-patch first, color-patch second."""

    NONE = "none"
    SPM = "spm"
    CPM = "cpm"
    BOTH = "both"


@dataclass(frozen=True)
class SpmOp:
    """One applied self-patch blend: source rect, destination origin, alpha.

    dst_origin is recorded before border clipping and may lie off-image.
    """

    src: Rect
    dst_origin: tuple[int, int]
    alpha: float

    def to_dict(self) -> dict:
        return {
            "src": [self.src.x0, self.src.y0, self.src.w, self.src.h],
            "dst_origin": list(self.dst_origin),
            "alpha": self.alpha,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SpmOp":
        return cls(Rect(*d["src"]), tuple(d["dst_origin"]), d["alpha"])


@dataclass(frozen=True)
class CpmOp:
    """One applied color-patch blend: rect, RGB color, alpha."""

    rect: Rect
    color: tuple[int, int, int]
    alpha: float

    def to_dict(self) -> dict:
        return {
            "rect": [self.rect.x0, self.rect.y0, self.rect.w, self.rect.h],
            "color": list(self.color),
            "alpha": self.alpha,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CpmOp":
        return cls(Rect(*d["rect"]), tuple(d["color"]), d["alpha"])


@dataclass
class AugResult:
    """Augmented image plus the exact operations that produced it."""

    image: np.ndarray
    mode: Mode
    spm_ops: list[SpmOp] = field(default_factory=list)
    cpm_ops: list[CpmOp] = field(default_factory=list)

    def op_log(self) -> dict:
        return {
            "mode": self.mode.value,
            "spm_ops": [op.to_dict() for op in self.spm_ops],
            "cpm_ops": [op.to_dict() for op in self.cpm_ops],
        }


def round_half_away(x: float) -> int:
    """Round half away from zero (for non-negative pixel math: floor(x + 0.5))."""
    return math.floor(x + 0.5) if x >= 0 else math.ceil(x - 0.5)


def boxes_from_xywh(boxes: Sequence[Sequence[float]]) -> list[BBox]:
    """Build BBox values from bare [x, y, w, h] rows."""
    return [BBox(float(b[0]), float(b[1]), float(b[2]), float(b[3])) for b in boxes]
