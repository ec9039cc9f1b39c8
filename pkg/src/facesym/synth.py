"""Synthesize asymmetric sequences by freezing one face half.

Inside the face crop, pixels on the frozen side of the midline are replaced
with their first-frame values in every frame; the other side and everything
outside the crop stay live. The cut is a hard vertical seam with no
blending, so the induced asymmetry is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams
from .face_regions import RegionConfig, compute_midline, face_crop_from_landmarks
from .media_io import Frame, FrameSequence, LandmarkSet


@dataclass(frozen=True)
class SynthConfig:
    """Which side to freeze at its first-frame appearance."""

    frozen_side: str = "right"

    def validate(self) -> None:
        if self.frozen_side not in ("left", "right"):
            raise InvalidParams(f"frozen_side must be 'left' or 'right', got {self.frozen_side!r}")


def synthesize_asymmetric(
    seq: FrameSequence,
    lm: LandmarkSet,
    config: SynthConfig | None = None,
    region_config: RegionConfig | None = None,
) -> FrameSequence:
    """Freeze one side of the face crop at frame 1 for the whole sequence.

    The seam column ceil(midline_x) belongs to the frozen side. The first
    output frame always equals the first input frame, and the operation is
    idempotent for a fixed configuration.
    """
    config = config or SynthConfig()
    config.validate()
    crop = face_crop_from_landmarks(lm, seq.width, seq.height, region_config)
    midline_crop = compute_midline(lm) - crop.x0
    seam = int(math.ceil(midline_crop))

    if config.frozen_side == "right":
        col_lo = crop.x0 + max(seam, 0)
        col_hi = crop.x1
    else:
        col_lo = crop.x0
        col_hi = crop.x0 + min(seam + 1, crop.width)
    first = seq.frames[0].pixels

    out_frames = []
    for frame in seq.frames:
        pixels = frame.pixels.copy()
        if col_lo < col_hi:
            pixels[crop.y0 : crop.y1, col_lo:col_hi] = first[
                crop.y0 : crop.y1, col_lo:col_hi
            ]
        out_frames.append(Frame(pixels))
    return FrameSequence(tuple(out_frames), seq.source_ids)
