"""Frame, landmark and report I/O.

Frames are grayscale intensity grids normalized to [0,1]. Supported inputs
are 8-bit binary PGM (P5) and 8/16-bit PNG; color PNGs are reduced with
Rec.601 luma. Flow dumps use the Middlebury binary layout. Landmark files
follow the 68-point JSON schema documented in ``parse_landmarks``.
"""

from __future__ import annotations

import json
import re
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np
from PIL import Image

from .errors import (
    DecodeError,
    DimensionMismatch,
    LandmarkCountError,
    SequenceTooShort,
    WriteError,
)

if TYPE_CHECKING:
    from .flow_engine import FlowField
    from .scoring import SymmetryReport

MIN_FRAME_SIDE = 16
FLOW_MAGIC = b"PIEH"

REPORT_CSV_HEADER = "region,v_left,v_right,delta_v,s_s"

# Rec.601 luma weights for color reduction.
LUMA_WEIGHTS = (0.299, 0.587, 0.114)


@dataclass(frozen=True, eq=False)
class Frame:
    """One grayscale frame; intensities are float64 in [0,1], row-major."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.ndim != 2:
            raise ValueError(f"frame must be 2-D, got shape {px.shape}")
        h, w = px.shape
        if h < MIN_FRAME_SIDE or w < MIN_FRAME_SIDE:
            raise ValueError(f"frame must be at least {MIN_FRAME_SIDE}px per side, got {w}x{h}")
        if not np.all(np.isfinite(px)):
            raise ValueError("frame contains non-finite intensities")
        if px.min() < 0.0 or px.max() > 1.0:
            raise ValueError("frame intensities must lie in [0,1]")
        px = px.copy()
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True, eq=False)
class FrameSequence:
    """Temporally ordered frames of uniform dimensions (N >= 2)."""

    frames: tuple[Frame, ...]
    source_ids: tuple[str, ...]

    def __post_init__(self):
        frames = tuple(self.frames)
        ids = tuple(self.source_ids)
        if len(frames) < 2:
            raise SequenceTooShort(f"need at least 2 frames, got {len(frames)}")
        if len(ids) != len(frames):
            raise ValueError("source_ids must match frame count")
        w, h = frames[0].width, frames[0].height
        for f, sid in zip(frames, ids):
            if f.width != w or f.height != h:
                raise DimensionMismatch(
                    f"frame {sid!r} is {f.width}x{f.height}, expected {w}x{h}"
                )
        object.__setattr__(self, "frames", frames)
        object.__setattr__(self, "source_ids", ids)

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def width(self) -> int:
        return self.frames[0].width

    @property
    def height(self) -> int:
        return self.frames[0].height


@dataclass(frozen=True, eq=False)
class LandmarkSet:
    """68 facial points in iBUG/300-W index order (jaw 0-16, brows 17-26,
    nose 27-35, eyes 36-47, mouth 48-67). Subpixel coordinates allowed."""

    points: np.ndarray
    image_width: int | None = None
    image_height: int | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError(f"landmarks must be (N,2), got {pts.shape}")
        if pts.shape[0] != 68:
            raise LandmarkCountError(pts.shape[0])
        if not np.all(np.isfinite(pts)):
            raise ValueError("landmarks contain non-finite coordinates")
        bridge_y = pts[27:31, 1]
        if not np.all(np.diff(bridge_y) > 0):
            raise ValueError("nose-bridge points 27-30 must have strictly increasing y")
        pts = pts.copy()
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)


def _natural_key(name: str) -> list:
    return [int(tok) if tok.isdigit() else tok.lower() for tok in re.split(r"(\d+)", name)]


def _load_pgm(path: Path) -> np.ndarray:
    data = path.read_bytes()

    pos = 0

    def next_token() -> bytes:
        nonlocal pos
        while pos < len(data):
            if data[pos : pos + 1].isspace():
                pos += 1
            elif data[pos : pos + 1] == b"#":
                while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                    pos += 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        return data[start:pos]

    magic = next_token()
    if magic != b"P5":
        raise DecodeError(str(path), f"not a binary PGM (magic {magic!r})")
    try:
        width = int(next_token())
        height = int(next_token())
        maxval = int(next_token())
    except ValueError as exc:
        raise DecodeError(str(path), "malformed PGM header") from exc
    if not (1 <= maxval <= 255):
        raise DecodeError(str(path), f"only 8-bit PGM supported (maxval {maxval})")
    pos += 1  # single whitespace byte after maxval
    raster = data[pos : pos + width * height]
    if len(raster) != width * height:
        raise DecodeError(str(path), "truncated PGM raster")
    values = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return values.astype(np.float64) / float(maxval)


def _load_png(path: Path) -> np.ndarray:
    try:
        with Image.open(path) as img:
            img.load()
            mode = img.mode
            if mode == "L":
                return np.asarray(img, dtype=np.float64) / 255.0
            if mode in ("I;16", "I;16B", "I;16L", "I"):
                arr = np.asarray(img, dtype=np.float64)
                return arr / 65535.0
            if mode in ("LA", "1"):
                return np.asarray(img.convert("L"), dtype=np.float64) / 255.0
            rgb = np.asarray(img.convert("RGB"), dtype=np.float64)
            r, g, b = LUMA_WEIGHTS
            return (r * rgb[:, :, 0] + g * rgb[:, :, 1] + b * rgb[:, :, 2]) / 255.0
    except DecodeError:
        raise
    except Exception as exc:
        raise DecodeError(str(path), str(exc)) from exc


def load_frame(path: str | Path) -> Frame:
    """Load a single frame, normalized to [0,1] by the format maximum."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".pgm":
        return Frame(_load_pgm(path))
    if suffix == ".png":
        return Frame(_load_png(path))
    raise DecodeError(str(path), f"unsupported format {suffix!r}")


def load_frame_sequence(directory: str | Path, pattern: str = "*") -> FrameSequence:
    """Load all PGM/PNG frames in ``directory`` matching ``pattern``.

    Frames are ordered by natural numeric order of their filenames, so
    ``frame2.png`` sorts before ``frame10.png``.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"not a directory: {directory}")
    paths = [
        p
        for p in directory.glob(pattern)
        if p.is_file() and p.suffix.lower() in (".pgm", ".png")
    ]
    paths.sort(key=lambda p: _natural_key(p.name))
    if len(paths) < 2:
        raise SequenceTooShort(
            f"{len(paths)} frame(s) matched {pattern!r} in {directory}; need at least 2"
        )
    frames = [load_frame(p) for p in paths]
    return FrameSequence(tuple(frames), tuple(p.name for p in paths))


def parse_landmarks(file: str | Path) -> LandmarkSet:
    """Parse a 68-point landmark JSON file.

    Schema: ``{"image_width": int, "image_height": int,
    "points": [[x, y], ...]}`` with points in iBUG index order. Entries may
    alternatively be objects ``{"index": i, "x": x, "y": y}`` in any order.
    Out-of-bounds points are not rejected here; they surface when the face
    regions are built.
    """
    file = Path(file)
    try:
        payload = json.loads(file.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DecodeError(str(file), str(exc)) from exc
    if not isinstance(payload, dict) or "points" not in payload:
        raise DecodeError(str(file), "missing 'points' key")
    raw = payload["points"]
    if not isinstance(raw, list):
        raise DecodeError(str(file), "'points' must be a list")
    if len(raw) != 68:
        raise LandmarkCountError(len(raw))

    points = np.zeros((68, 2), dtype=np.float64)
    if all(isinstance(e, dict) for e in raw):
        seen = set()
        for entry in raw:
            try:
                idx = int(entry["index"])
                points[idx] = (float(entry["x"]), float(entry["y"]))
            except (KeyError, TypeError, ValueError, IndexError) as exc:
                raise DecodeError(str(file), f"bad landmark entry {entry!r}") from exc
            if idx in seen:
                raise DecodeError(str(file), f"duplicate landmark index {idx}")
            seen.add(idx)
    else:
        for i, entry in enumerate(raw):
            try:
                x, y = entry
                points[i] = (float(x), float(y))
            except (TypeError, ValueError) as exc:
                raise DecodeError(str(file), f"bad landmark entry {entry!r}") from exc

    return LandmarkSet(
        points,
        image_width=payload.get("image_width"),
        image_height=payload.get("image_height"),
    )


def write_landmarks(lm: LandmarkSet, file: str | Path) -> None:
    """Write a LandmarkSet back to the JSON schema."""
    payload = {
        "image_width": lm.image_width,
        "image_height": lm.image_height,
        "points": [[float(x), float(y)] for x, y in lm.points],
    }
    try:
        Path(file).write_text(json.dumps(payload, indent=2) + "\n")
    except OSError as exc:
        raise WriteError(f"cannot write {file}: {exc}") from exc


def write_flow_file(flow: "FlowField", file: str | Path) -> None:
    """Write a flow field as a Middlebury-style binary dump.

    Layout: magic ``PIEH``, width and height as little-endian int32, then
    row-major interleaved (u, v) little-endian float32.
    """
    u = np.asarray(flow.u, dtype="<f4")
    v = np.asarray(flow.v, dtype="<f4")
    h, w = u.shape
    interleaved = np.empty((h, w, 2), dtype="<f4")
    interleaved[:, :, 0] = u
    interleaved[:, :, 1] = v
    try:
        with open(file, "wb") as fh:
            fh.write(FLOW_MAGIC)
            fh.write(struct.pack("<ii", w, h))
            fh.write(interleaved.tobytes())
    except OSError as exc:
        raise WriteError(f"cannot write {file}: {exc}") from exc


def read_flow_file(file: str | Path) -> "FlowField":
    """Read a flow dump written by :func:`write_flow_file`."""
    from .flow_engine import FlowField

    file = Path(file)
    data = file.read_bytes()
    if data[:4] != FLOW_MAGIC:
        raise DecodeError(str(file), f"bad flow magic {data[:4]!r}")
    w, h = struct.unpack("<ii", data[4:12])
    expected = 4 + 8 + 8 * w * h
    if len(data) != expected:
        raise DecodeError(str(file), f"flow file is {len(data)} bytes, expected {expected}")
    interleaved = np.frombuffer(data[12:], dtype="<f4").reshape(h, w, 2)
    return FlowField(
        interleaved[:, :, 0].astype(np.float64),
        interleaved[:, :, 1].astype(np.float64),
    )


def _format_float(x: float) -> str:
    return repr(float(x))


def report_to_dict(report: "SymmetryReport") -> dict:
    """Deterministic dict form of a report (fixed key order)."""
    fp = report.flow_params
    return {
        "n_frames": report.n_frames,
        "config": {
            "lambda": report.config.lambda_,
            "threshold_factor": report.config.threshold_factor,
        },
        "flow_params": {
            "pyramid_levels": fp.pyramid_levels,
            "pyramid_scale": fp.pyramid_scale,
            "iterations_per_level": fp.iterations_per_level,
            "poly_n": fp.poly_n,
            "poly_sigma": fp.poly_sigma,
            "avg_window": fp.avg_window,
        },
        "regions": [
            {
                "region": r.region,
                "v_left": r.v_left,
                "v_right": r.v_right,
                "delta_v": r.delta_v,
                "s_s": r.s_s,
                "m_left": r.m_left,
                "m_right": r.m_right,
            }
            for r in report.regions
        ],
    }


def format_report_csv(report: "SymmetryReport") -> str:
    lines = [REPORT_CSV_HEADER]
    for r in report.regions:
        lines.append(
            ",".join(
                [
                    r.region,
                    _format_float(r.v_left),
                    _format_float(r.v_right),
                    _format_float(r.delta_v),
                    _format_float(r.s_s),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def write_report(report: "SymmetryReport", format: str, file: str | Path) -> None:
    """Serialize a report as JSON (with config echo) or CSV.

    Serialization is deterministic: the same report always produces
    byte-identical output.
    """
    if format == "json":
        text = json.dumps(report_to_dict(report), indent=2) + "\n"
    elif format == "csv":
        text = format_report_csv(report)
    else:
        raise ValueError(f"unknown report format {format!r}")
    try:
        Path(file).write_text(text)
    except OSError as exc:
        raise WriteError(f"cannot write {file}: {exc}") from exc


def read_report(file: str | Path) -> "SymmetryReport":
    """Parse a JSON report back into a SymmetryReport (round-trip inverse)."""
    from .flow_engine import FlowParams
    from .scoring import RegionScore, ScoreConfig, SymmetryReport

    payload = json.loads(Path(file).read_text())
    config = ScoreConfig(
        lambda_=payload["config"]["lambda"],
        threshold_factor=payload["config"]["threshold_factor"],
    )
    flow_params = FlowParams(**payload["flow_params"])
    regions = tuple(
        RegionScore(
            region=r["region"],
            v_left=r["v_left"],
            v_right=r["v_right"],
            delta_v=r["delta_v"],
            s_s=r["s_s"],
            m_left=r["m_left"],
            m_right=r["m_right"],
        )
        for r in payload["regions"]
    )
    return SymmetryReport(
        regions=regions,
        n_frames=payload["n_frames"],
        config=config,
        flow_params=flow_params,
    )


def write_gray_image(pixels: np.ndarray, file: str | Path) -> None:
    """Write a [0,1] grayscale array as an 8-bit PNG."""
    arr = np.clip(np.rint(np.asarray(pixels) * 255.0), 0, 255).astype(np.uint8)
    try:
        Image.fromarray(arr, mode="L").save(Path(file), format="PNG")
    except OSError as exc:
        raise WriteError(f"cannot write {file}: {exc}") from exc


def write_color_image(rgb: np.ndarray, file: str | Path) -> None:
    """Write an (H,W,3) [0,1] array as an 8-bit RGB PNG."""
    arr = np.clip(np.rint(np.asarray(rgb) * 255.0), 0, 255).astype(np.uint8)
    try:
        Image.fromarray(arr, mode="RGB").save(Path(file), format="PNG")
    except OSError as exc:
        raise WriteError(f"cannot write {file}: {exc}") from exc


def write_pgm(pixels: np.ndarray, file: str | Path) -> None:
    """Write a [0,1] grayscale array as an 8-bit binary PGM (P5)."""
    arr = np.clip(np.rint(np.asarray(pixels) * 255.0), 0, 255).astype(np.uint8)
    h, w = arr.shape
    try:
        with open(file, "wb") as fh:
            fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
            fh.write(arr.tobytes())
    except OSError as exc:
        raise WriteError(f"cannot write {file}: {exc}") from exc
