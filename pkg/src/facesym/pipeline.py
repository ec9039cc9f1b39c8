"""High-level operations shared by the CLI and the HTTP service.

Each runner loads inputs, executes one pipeline, writes its outputs and
returns a summary. Errors are wrapped with the stage they occurred in so
callers can report a stage-labeled message.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

from . import media_io
from .errors import DecodeError, FacesymError, PipelineError
from .face_regions import RegionConfig, build_regions, crop_pixels, face_crop_from_landmarks
from .flow_engine import FlowParams
from .media_io import FrameSequence, LandmarkSet
from .overlay import OverlaySpec, render_overlay
from .scoring import (
    ScoreConfig,
    SymmetryReport,
    calibrate_lambda,
    magnitude_maps,
    pair_flow_fields,
    score_sequence,
)
from .synth import SynthConfig, synthesize_asymmetric


def _stage(name: str, fn):
    try:
        return fn()
    except PipelineError:
        raise
    except (FacesymError, OSError) as exc:
        raise PipelineError(name, exc) from exc


def load_inputs(
    input_dir: str | Path, landmarks_path: str | Path, pattern: str = "*"
) -> tuple[FrameSequence, LandmarkSet]:
    seq = _stage("load", lambda: media_io.load_frame_sequence(input_dir, pattern))
    lm = _stage("load", lambda: media_io.parse_landmarks(landmarks_path))
    return seq, lm


def run_score(
    input_dir: str | Path,
    landmarks_path: str | Path,
    out_file: str | Path | None = None,
    out_format: str = "json",
    config: ScoreConfig | None = None,
    flow_params: FlowParams | None = None,
    region_config: RegionConfig | None = None,
    pattern: str = "*",
) -> SymmetryReport:
    """Score a sequence and optionally write the report file."""
    seq, lm = load_inputs(input_dir, landmarks_path, pattern)
    report = score_sequence(seq, lm, flow_params, config, region_config)
    if out_file is not None:
        _stage("write", lambda: media_io.write_report(report, out_format, out_file))
    return report


def run_synthesize(
    input_dir: str | Path,
    landmarks_path: str | Path,
    out_dir: str | Path,
    side: str = "right",
    region_config: RegionConfig | None = None,
    pattern: str = "*",
) -> list[str]:
    """Write the half-frozen sequence as 8-bit grayscale PNGs."""
    seq, lm = load_inputs(input_dir, landmarks_path, pattern)
    synth = _stage(
        "synthesize",
        lambda: synthesize_asymmetric(seq, lm, SynthConfig(side), region_config),
    )
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for frame, source_id in zip(synth.frames, synth.source_ids):
        out_path = out_dir / (Path(source_id).stem + ".png")
        _stage("write", lambda f=frame, p=out_path: media_io.write_gray_image(f.pixels, p))
        written.append(str(out_path))
    return written


def run_flow_dump(
    input_dir: str | Path,
    landmarks_path: str | Path,
    out_dir: str | Path,
    flow_params: FlowParams | None = None,
    region_config: RegionConfig | None = None,
    pattern: str = "*",
) -> list[str]:
    """Write one Middlebury flow dump per frame pair (crop coordinates)."""
    flow_params = flow_params or FlowParams()
    seq, lm = load_inputs(input_dir, landmarks_path, pattern)
    crop = _stage(
        "regions",
        lambda: face_crop_from_landmarks(lm, seq.width, seq.height, region_config),
    )
    cropped = [crop_pixels(f.pixels, crop) for f in seq.frames]
    flows = _stage("flow", lambda: pair_flow_fields(cropped, flow_params))
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for t, flow in enumerate(flows, start=2):
        out_path = out_dir / f"flow_{t:04d}.flo"
        _stage("write", lambda fl=flow, p=out_path: media_io.write_flow_file(fl, p))
        written.append(str(out_path))
    return written


def run_overlay(
    input_dir: str | Path,
    landmarks_path: str | Path,
    out_dir: str | Path,
    alpha: float = 0.5,
    threshold_factor: float = 6.0,
    flow_params: FlowParams | None = None,
    region_config: RegionConfig | None = None,
    pattern: str = "*",
) -> list[str]:
    """Render per-pair heatmap overlays as RGB PNGs.

    Magnitudes are normalized by the per-sequence maximum so colors stay
    comparable across frames; overlay t is drawn on the pair's later frame.
    """
    flow_params = flow_params or FlowParams()
    seq, lm = load_inputs(input_dir, landmarks_path, pattern)
    regions = _stage(
        "regions",
        lambda: build_regions(
            lm,
            face_crop_from_landmarks(lm, seq.width, seq.height, region_config),
            region_config,
        ),
    )
    mags = _stage(
        "flow", lambda: magnitude_maps(seq, regions, flow_params, threshold_factor)
    )
    max_mag = max((float(m.max()) for m in mags), default=0.0)
    spec = OverlaySpec(alpha=alpha, max_magnitude=max_mag)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for t, mag in enumerate(mags, start=2):
        rgb = render_overlay(seq.frames[t - 1], mag, regions.crop, spec)
        out_path = out_dir / f"overlay_{t:04d}.png"
        _stage("write", lambda im=rgb, p=out_path: media_io.write_color_image(im, p))
        written.append(str(out_path))
    return written


def run_calibrate(samples: Sequence[tuple[float, float]]) -> float:
    """Fit the score coefficient from (delta_v, expert_score) samples."""
    return _stage("calibrate", lambda: calibrate_lambda(samples))


def load_calibration_samples(file: str | Path) -> list[tuple[float, float]]:
    """Read calibration samples from JSON: either ``[[d, e], ...]`` or
    ``{"samples": [[d, e], ...]}``."""

    def parse():
        payload = json.loads(Path(file).read_text())
        if isinstance(payload, dict):
            payload = payload.get("samples")
        if not isinstance(payload, list):
            raise DecodeError(str(file), "expected a list of [delta_v, expert] pairs")
        out = []
        for entry in payload:
            d, e = entry
            out.append((float(d), float(e)))
        return out

    return _stage("load", parse)
