"""facesym: facial motion asymmetry scoring from frontal frame sequences."""

__version__ = "0.1.0"

from .errors import (
    CalibrationUnderdetermined,
    CropTooSmall,
    DecodeError,
    DegenerateRegion,
    DimensionMismatch,
    FacesymError,
    InvalidParams,
    LandmarkCountError,
    LandmarkOutOfBounds,
    PipelineError,
    SequenceTooShort,
    WriteError,
)
from .face_regions import CropRect, RegionConfig, RegionSet, build_regions, compute_midline, face_crop_from_landmarks
from .flow_engine import FlowField, FlowParams, PolyCoeffs, estimate_flow_pair, flow_magnitude, polynomial_expansion
from .media_io import (
    Frame,
    FrameSequence,
    LandmarkSet,
    load_frame_sequence,
    parse_landmarks,
    read_flow_file,
    read_report,
    write_flow_file,
    write_report,
)
from .overlay import OverlaySpec, heat_colormap, render_overlay
from .scoring import (
    RegionScore,
    ScoreConfig,
    SymmetryReport,
    calibrate_lambda,
    movement_score,
    score_sequence,
    symmetry_score,
    threshold_magnitudes,
)
from .synth import SynthConfig, synthesize_asymmetric

__all__ = [
    "__version__",
    "CalibrationUnderdetermined",
    "CropRect",
    "CropTooSmall",
    "DecodeError",
    "DegenerateRegion",
    "DimensionMismatch",
    "FacesymError",
    "FlowField",
    "FlowParams",
    "Frame",
    "FrameSequence",
    "InvalidParams",
    "LandmarkCountError",
    "LandmarkOutOfBounds",
    "LandmarkSet",
    "OverlaySpec",
    "PipelineError",
    "PolyCoeffs",
    "RegionConfig",
    "RegionScore",
    "RegionSet",
    "ScoreConfig",
    "SequenceTooShort",
    "SymmetryReport",
    "SynthConfig",
    "WriteError",
    "build_regions",
    "calibrate_lambda",
    "compute_midline",
    "estimate_flow_pair",
    "face_crop_from_landmarks",
    "flow_magnitude",
    "heat_colormap",
    "load_frame_sequence",
    "movement_score",
    "parse_landmarks",
    "polynomial_expansion",
    "read_flow_file",
    "read_report",
    "render_overlay",
    "score_sequence",
    "symmetry_score",
    "synthesize_asymmetric",
    "threshold_magnitudes",
    "write_flow_file",
    "write_report",
]
