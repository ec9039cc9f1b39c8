"""Face crop, midline and left/right region masks from first-frame landmarks.

The crop is the landmark bounding box with fixed fractional margins. The
midline is the mean x of the nose-bridge and chin landmarks. Three
horizontal bands (forehead, eye, cheek incl. mouth) are cut from the crop
and split at the midline into left and right masks; "left" and "right" are
image coordinates (viewer's perspective). All geometry is taken from the
first frame and stays fixed for the whole sequence.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CropTooSmall, DegenerateRegion, LandmarkOutOfBounds
from .media_io import LandmarkSet

REGIONS = ("forehead", "eye", "cheek")
SIDES = ("left", "right")

# Landmark index groups (iBUG convention).
BROW_IDX = slice(17, 27)
EYE_IDX = slice(36, 48)
JAW_IDX = slice(0, 17)
MOUTH_IDX = slice(48, 68)
MIDLINE_IDX = (27, 28, 29, 30, 8)


@dataclass(frozen=True)
class RegionConfig:
    """Fractional margins of the crop and bands, overridable via JSON."""

    crop_expand_x: float = 0.20
    crop_expand_top: float = 0.45
    crop_expand_bottom: float = 0.05
    eye_band_margin: float = 0.15

    @classmethod
    def from_file(cls, file: str | Path) -> "RegionConfig":
        payload = json.loads(Path(file).read_text())
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(payload) - known
        if unknown:
            raise ValueError(f"unknown region config keys: {sorted(unknown)}")
        return cls(**payload)


@dataclass(frozen=True)
class CropRect:
    """Pixel bounds, inclusive-exclusive; at least 32px per side."""

    x0: int
    y0: int
    x1: int
    y1: int

    def __post_init__(self):
        if self.width < 32 or self.height < 32:
            raise CropTooSmall(f"crop {self.width}x{self.height} is below 32x32")

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def height(self) -> int:
        return self.y1 - self.y0


@dataclass(frozen=True, eq=False)
class RegionSet:
    """Six boolean masks over the crop keyed by (region, side), plus the
    crop rectangle and the subpixel midline column in crop coordinates."""

    crop: CropRect
    midline_x: float
    masks: dict[tuple[str, str], np.ndarray]
    pixel_counts: dict[tuple[str, str], int]


def face_crop_from_landmarks(
    lm: LandmarkSet,
    frame_w: int,
    frame_h: int,
    config: RegionConfig | None = None,
) -> CropRect:
    """Expand the landmark bounding box into the face crop.

    Margins: crop_expand_x of box width on each side, crop_expand_top of box
    height upward (forehead headroom), crop_expand_bottom downward. The
    result is clamped to the frame.
    """
    config = config or RegionConfig()
    pts = lm.points
    if (
        pts[:, 0].min() < 0
        or pts[:, 1].min() < 0
        or pts[:, 0].max() >= frame_w
        or pts[:, 1].max() >= frame_h
    ):
        raise LandmarkOutOfBounds(
            f"landmarks exceed the {frame_w}x{frame_h} frame bounds"
        )
    min_x, min_y = pts.min(axis=0)
    max_x, max_y = pts.max(axis=0)
    bw = max_x - min_x
    bh = max_y - min_y
    x0 = max(0, int(math.floor(min_x - config.crop_expand_x * bw)))
    x1 = min(frame_w, int(math.ceil(max_x + config.crop_expand_x * bw)))
    y0 = max(0, int(math.floor(min_y - config.crop_expand_top * bh)))
    y1 = min(frame_h, int(math.ceil(max_y + config.crop_expand_bottom * bh)))
    if x1 - x0 < 32 or y1 - y0 < 32:
        raise CropTooSmall(f"face crop {x1 - x0}x{y1 - y0} is below 32x32")
    return CropRect(x0, y0, x1, y1)


def compute_midline(lm: LandmarkSet) -> float:
    """Mean x of nose-bridge landmarks 27-30 and chin landmark 8 (frame
    coordinates); these lie on the anatomical midline and move little with
    expression."""
    return float(np.mean(lm.points[list(MIDLINE_IDX), 0]))


def _band_rows(lo: float, hi: float, crop: CropRect) -> range:
    """Integer crop rows r with lo <= r < hi, after clipping to the crop."""
    lo = max(lo, float(crop.y0))
    hi = min(hi, float(crop.y1))
    start = int(math.ceil(lo - crop.y0))
    stop = int(math.ceil(hi - crop.y0))
    return range(max(start, 0), max(stop, 0))


def build_regions(
    lm: LandmarkSet, crop: CropRect, config: RegionConfig | None = None
) -> RegionSet:
    """Cut the crop into forehead/eye/cheek bands split at the midline.

    Band boundaries (frame y): forehead runs from the crop top to the brow
    minimum; the eye band extends to the eye maximum plus eye_band_margin of
    its own height; the cheek band (mouth included) runs to the jaw/mouth
    maximum. Each band is split into left (x < midline) and right
    (x >= midline) masks.
    """
    config = config or RegionConfig()
    pts = lm.points
    if (
        pts[:, 0].min() < crop.x0
        or pts[:, 1].min() < crop.y0
        or pts[:, 0].max() >= crop.x1
        or pts[:, 1].max() >= crop.y1
    ):
        raise LandmarkOutOfBounds("landmarks fall outside the face crop")

    brow_min = pts[BROW_IDX, 1].min()
    eye_max = pts[EYE_IDX, 1].max()
    jaw_mouth_max = max(pts[JAW_IDX, 1].max(), pts[MOUTH_IDX, 1].max())
    eye_bottom = eye_max + config.eye_band_margin * (eye_max - brow_min)

    bands = {
        "forehead": _band_rows(crop.y0, brow_min, crop),
        "eye": _band_rows(brow_min, eye_bottom, crop),
        "cheek": _band_rows(eye_bottom, jaw_mouth_max, crop),
    }

    midline = compute_midline(lm) - crop.x0
    if not (0.0 < midline < crop.width):
        raise DegenerateRegion("all", f"midline {midline:.2f} outside crop columns")
    # Columns strictly left of the midline; an integer midline column itself
    # belongs to the right side.
    left_cols = int(midline) if float(midline).is_integer() else int(math.ceil(midline))

    masks: dict[tuple[str, str], np.ndarray] = {}
    counts: dict[tuple[str, str], int] = {}
    for region, rows in bands.items():
        if len(rows) == 0:
            raise DegenerateRegion(region, "empty band")
        for side in SIDES:
            mask = np.zeros((crop.height, crop.width), dtype=bool)
            if side == "left":
                mask[rows.start : rows.stop, :left_cols] = True
            else:
                mask[rows.start : rows.stop, left_cols:] = True
            count = int(mask.sum())
            if count == 0:
                raise DegenerateRegion(region, f"{side} mask is empty")
            mask.flags.writeable = False
            masks[(region, side)] = mask
            counts[(region, side)] = count

    return RegionSet(crop=crop, midline_x=midline, masks=masks, pixel_counts=counts)


def crop_pixels(pixels: np.ndarray, crop: CropRect) -> np.ndarray:
    """View of the crop window of a full-frame array."""
    return pixels[crop.y0 : crop.y1, crop.x0 : crop.x1]
