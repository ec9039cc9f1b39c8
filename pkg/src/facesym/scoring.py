"""Movement and symmetry scoring of a frame sequence.

Per frame pair the flow magnitude is noise-thresholded against the mean
magnitude of the cropped face. The Movement Score of a mask is the total
thresholded magnitude per pixel per frame,

    V = (1 / (M (N-1))) * sum_{t=2..N} sum_{(x,y) in mask} f(x, y, t),

with M the mask pixel count and N the frame count. The Symmetry Score of a
region compares its two sides,

    S = clamp(1 - lambda * |V_left - V_right|, 0, 1).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateRegion, CalibrationUnderdetermined, InvalidParams, PipelineError, FacesymError
from .face_regions import REGIONS, RegionConfig, RegionSet, build_regions, crop_pixels, face_crop_from_landmarks
from .flow_engine import FlowField, FlowParams, estimate_flow_pair, flow_magnitude
from .media_io import FrameSequence, LandmarkSet

THREAD_ENV_VAR = "FACESYM_THREADS"


@dataclass(frozen=True)
class ScoreConfig:
    """Scoring constants; scores are always clamped to [0,1].

    Defaults follow the calibrated coefficient 3.8 and the 6x-mean noise
    threshold; both are dataset-dependent and configurable.
    """

    lambda_: float = 3.8
    threshold_factor: float = 6.0

    def validate(self) -> None:
        if not self.lambda_ > 0:
            raise InvalidParams(f"lambda must be > 0, got {self.lambda_}")
        if self.threshold_factor < 0:
            raise InvalidParams(
                f"threshold_factor must be >= 0, got {self.threshold_factor}"
            )


@dataclass(frozen=True)
class RegionScore:
    region: str
    v_left: float
    v_right: float
    delta_v: float
    s_s: float
    m_left: int
    m_right: int


@dataclass(frozen=True)
class SymmetryReport:
    """Per-region movement and symmetry scores plus the configuration echo."""

    regions: tuple[RegionScore, ...]
    n_frames: int
    config: ScoreConfig
    flow_params: FlowParams


def threshold_magnitudes(mag: np.ndarray, factor: float) -> np.ndarray:
    """Zero out magnitudes below ``factor`` times the mean over the crop.

    The mean is the plain mean over every crop pixel of this frame pair;
    thresholding is applied independently per pair. Values at or above the
    threshold pass through unchanged, so the result never exceeds the input.
    """
    mag = np.asarray(mag, dtype=np.float64)
    mu = mag.mean()
    return np.where(mag < factor * mu, 0.0, mag)


def movement_score(mags: Sequence[np.ndarray], mask: np.ndarray, n_frames: int) -> float:
    """Mean thresholded magnitude per mask pixel per frame pair (V)."""
    if len(mags) != n_frames - 1:
        raise ValueError(f"expected {n_frames - 1} magnitude maps, got {len(mags)}")
    m = int(np.count_nonzero(mask))
    if m == 0:
        raise DegenerateRegion("mask", "empty mask in movement_score")
    total = 0.0
    for mag in mags:
        total += float(mag[mask].sum())
    return total / (m * (n_frames - 1))


def symmetry_score(v_left: float, v_right: float, lambda_: float) -> float:
    """S = 1 - lambda*|v_left - v_right|, clamped to [0,1]."""
    raw = 1.0 - lambda_ * abs(v_left - v_right)
    return min(1.0, max(0.0, raw))


def calibrate_lambda(samples: Iterable[tuple[float, float]]) -> float:
    """Fit lambda to (delta_v, expert_score) pairs by least squares.

    Minimizes sum (1 - lambda*d - e)^2 over samples with d > 0, giving the
    closed form lambda = sum d*(1-e) / sum d^2. At least one sample must
    have d > 0 and e < 1, otherwise the fit is unconstrained.
    """
    usable = [(float(d), float(e)) for d, e in samples if d > 0]
    if not any(e < 1.0 for _, e in usable):
        raise CalibrationUnderdetermined(
            "need at least one sample with delta_v > 0 and expert_score < 1"
        )
    num = sum(d * (1.0 - e) for d, e in usable)
    den = sum(d * d for d, e in usable)
    return num / den


def worker_count(n_tasks: int) -> int:
    """Worker cap for per-pair work; FACESYM_THREADS overrides the CPU count."""
    env = os.environ.get(THREAD_ENV_VAR)
    if env is not None:
        try:
            cap = int(env)
        except ValueError:
            raise InvalidParams(f"{THREAD_ENV_VAR} must be an integer, got {env!r}")
        cap = max(1, cap)
    else:
        cap = os.cpu_count() or 1
    return max(1, min(cap, n_tasks))


def pair_flow_fields(
    cropped: Sequence[np.ndarray], params: FlowParams
) -> list[FlowField]:
    """Flow fields for consecutive crop pairs; pairs run concurrently but
    results keep temporal order."""
    pairs = list(zip(cropped[:-1], cropped[1:]))
    workers = worker_count(len(pairs))
    if workers == 1:
        return [estimate_flow_pair(a, b, params) for a, b in pairs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda ab: estimate_flow_pair(ab[0], ab[1], params), pairs))


def magnitude_maps(
    seq: FrameSequence,
    regions: RegionSet,
    flow_params: FlowParams,
    threshold_factor: float,
) -> list[np.ndarray]:
    """Thresholded flow-magnitude maps over the crop, one per frame pair."""
    cropped = [crop_pixels(f.pixels, regions.crop) for f in seq.frames]
    flows = pair_flow_fields(cropped, flow_params)
    return [threshold_magnitudes(flow_magnitude(fl), threshold_factor) for fl in flows]


def score_sequence(
    seq: FrameSequence,
    lm: LandmarkSet,
    flow_params: FlowParams | None = None,
    config: ScoreConfig | None = None,
    region_config: RegionConfig | None = None,
) -> SymmetryReport:
    """Full scoring pipeline: crop, per-pair flow, magnitude threshold,
    per-mask Movement Scores, per-region Symmetry Scores.

    Deterministic; errors are re-raised with the failing stage label.
    """
    flow_params = flow_params or FlowParams()
    config = config or ScoreConfig()

    def stage(name: str, fn):
        try:
            return fn()
        except FacesymError as exc:
            raise PipelineError(name, exc) from exc

    stage("params", lambda: (flow_params.validate(), config.validate()))
    regions = stage(
        "regions",
        lambda: build_regions(
            lm,
            face_crop_from_landmarks(lm, seq.width, seq.height, region_config),
            region_config,
        ),
    )
    mags = stage(
        "flow",
        lambda: magnitude_maps(seq, regions, flow_params, config.threshold_factor),
    )

    def build_scores() -> tuple[RegionScore, ...]:
        n = len(seq)
        out = []
        for region in REGIONS:
            v = {
                side: movement_score(mags, regions.masks[(region, side)], n)
                for side in ("left", "right")
            }
            out.append(
                RegionScore(
                    region=region,
                    v_left=v["left"],
                    v_right=v["right"],
                    delta_v=abs(v["left"] - v["right"]),
                    s_s=symmetry_score(v["left"], v["right"], config.lambda_),
                    m_left=regions.pixel_counts[(region, "left")],
                    m_right=regions.pixel_counts[(region, "right")],
                )
            )
        return tuple(out)

    scores = stage("score", build_scores)
    return SymmetryReport(
        regions=scores, n_frames=len(seq), config=config, flow_params=flow_params
    )
