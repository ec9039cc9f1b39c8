"""Exception types shared across the toolkit.

Every error raised on a pipeline path derives from FacesymError so callers
(CLI, service) can map failures to exit code 1 / HTTP 400 uniformly.
"""

from __future__ import annotations


class FacesymError(Exception):
    """Base class for all toolkit errors."""


class SequenceTooShort(FacesymError):
    """Fewer than two frames matched; motion needs at least one frame pair."""


class DimensionMismatch(FacesymError):
    """Frames (or flow fields) in one computation have different sizes."""


class DecodeError(FacesymError):
    """An input file exists but could not be decoded."""

    def __init__(self, filename: str, reason: str = ""):
        self.filename = filename
        msg = f"cannot decode {filename!r}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class WriteError(FacesymError):
    """An output file could not be written."""


class LandmarkCountError(FacesymError):
    """A landmark file did not contain exactly 68 points."""

    def __init__(self, found: int):
        self.found = found
        super().__init__(f"expected 68 landmark points, found {found}")


class LandmarkOutOfBounds(FacesymError):
    """A landmark lies outside the frame or face crop."""


class InvalidParams(FacesymError):
    """Flow or scoring parameters violate their constraints."""


class CropTooSmall(FacesymError):
    """The derived face crop is below the minimum usable size."""


class DegenerateRegion(FacesymError):
    """A face region mask came out empty."""

    def __init__(self, region: str, detail: str = ""):
        self.region = region
        msg = f"degenerate region {region!r}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class CalibrationUnderdetermined(FacesymError):
    """No calibration sample constrains the score coefficient."""


class PipelineError(FacesymError):
    """Wraps an error with the pipeline stage it occurred in."""

    def __init__(self, stage: str, original: BaseException):
        self.stage = stage
        self.original = original
        super().__init__(f"{stage}: {type(original).__name__}: {original}")
