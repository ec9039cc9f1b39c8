"""Flow-magnitude heatmap overlays on the face images."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams
from .face_regions import CropRect
from .media_io import Frame


@dataclass(frozen=True)
class OverlaySpec:
    """Blend factor and the normalization constant (per-sequence maximum
    magnitude) for the fixed blue-green-red colormap."""

    alpha: float = 0.5
    max_magnitude: float = 0.0

    def validate(self) -> None:
        if not (0.0 <= self.alpha <= 1.0):
            raise InvalidParams(f"alpha must lie in [0,1], got {self.alpha}")
        if self.max_magnitude < 0:
            raise InvalidParams(f"max_magnitude must be >= 0, got {self.max_magnitude}")


def heat_colormap(t: np.ndarray) -> np.ndarray:
    """Piecewise-linear blue -> green -> red colormap over t in [0,1]."""
    t = np.clip(np.asarray(t, dtype=np.float64), 0.0, 1.0)
    lower = t <= 0.5
    r = np.where(lower, 0.0, 2.0 * (t - 0.5))
    g = np.where(lower, 2.0 * t, 1.0 - 2.0 * (t - 0.5))
    b = np.where(lower, 1.0 - 2.0 * t, 0.0)
    return np.stack([r, g, b], axis=-1)


def render_overlay(
    frame: Frame, mag: np.ndarray, crop: CropRect, spec: OverlaySpec
) -> np.ndarray:
    """Blend the magnitude heatmap over the grayscale frame.

    Inside the crop, pixels with nonzero magnitude become
    (1-alpha)*gray + alpha*colormap(mag/max); zero-magnitude pixels and
    everything outside the crop keep the original intensity. Returns an
    (H,W,3) RGB array in [0,1].
    """
    spec.validate()
    gray = frame.pixels
    mag = np.asarray(mag, dtype=np.float64)
    if mag.shape != (crop.height, crop.width):
        raise InvalidParams(
            f"magnitude map {mag.shape} does not cover the crop "
            f"({crop.height}, {crop.width})"
        )

    rgb = np.repeat(gray[:, :, np.newaxis], 3, axis=2).copy()
    if spec.max_magnitude > 0:
        colors = heat_colormap(mag / spec.max_magnitude)
        window = rgb[crop.y0 : crop.y1, crop.x0 : crop.x1]
        gray_win = gray[crop.y0 : crop.y1, crop.x0 : crop.x1, np.newaxis]
        blended = (1.0 - spec.alpha) * gray_win + spec.alpha * colors
        active = (mag > 0)[:, :, np.newaxis]
        rgb[crop.y0 : crop.y1, crop.x0 : crop.x1] = np.where(active, blended, window)
    return rgb
