import json

import numpy as np
import pytest

from facesym import (
    DecodeError,
    DimensionMismatch,
    FlowParams,
    Frame,
    LandmarkCountError,
    SequenceTooShort,
    read_flow_file,
    read_report,
    write_flow_file,
    write_report,
)
from facesym.flow_engine import FlowField
from facesym.media_io import (
    FLOW_MAGIC,
    format_report_csv,
    load_frame,
    load_frame_sequence,
    parse_landmarks,
    write_gray_image,
    write_landmarks,
    write_pgm,
)
from facesym.scoring import RegionScore, ScoreConfig, SymmetryReport
from synthfaces import face_landmarks


def make_pgm(path, values, maxval=255):
    values = np.asarray(values, dtype=np.uint8)
    h, w = values.shape
    path.write_bytes(f"P5\n{w} {h}\n{maxval}\n".encode() + values.tobytes())


def gradient(shape=(64, 64)):
    h, w = shape
    return (np.arange(h * w, dtype=np.int64).reshape(h, w) % 256).astype(np.uint8)


def test_load_sequence_counts_and_order(tmp_path):
    for i in range(1, 11):
        make_pgm(tmp_path / f"{i:03d}.pgm", gradient())
    seq = load_frame_sequence(tmp_path, "*.pgm")
    assert len(seq) == 10
    assert seq.source_ids == tuple(f"{i:03d}.pgm" for i in range(1, 11))


def test_natural_numeric_order(tmp_path):
    for name in ["frame10.pgm", "frame2.pgm", "frame1.pgm"]:
        make_pgm(tmp_path / name, gradient((16, 16)))
    seq = load_frame_sequence(tmp_path)
    assert seq.source_ids == ("frame1.pgm", "frame2.pgm", "frame10.pgm")


def test_pgm_values_map_exactly(tmp_path):
    values = gradient((16, 16))
    make_pgm(tmp_path / "a.pgm", values)
    frame = load_frame(tmp_path / "a.pgm")
    assert np.array_equal(frame.pixels, values.astype(np.float64) / 255.0)


def test_pgm_255_is_one(tmp_path):
    values = np.full((16, 16), 255, dtype=np.uint8)
    make_pgm(tmp_path / "a.pgm", values)
    assert load_frame(tmp_path / "a.pgm").pixels.max() == 1.0


def test_pgm_header_comments(tmp_path):
    values = gradient((16, 16))
    path = tmp_path / "c.pgm"
    path.write_bytes(b"P5\n# a comment\n16 16\n# another\n255\n" + values.tobytes())
    assert np.array_equal(load_frame(path).pixels, values / 255.0)


def test_single_file_is_too_short(tmp_path):
    make_pgm(tmp_path / "only.pgm", gradient())
    with pytest.raises(SequenceTooShort):
        load_frame_sequence(tmp_path)


def test_mixed_dimensions_rejected(tmp_path):
    make_pgm(tmp_path / "a.pgm", gradient((32, 32)))
    make_pgm(tmp_path / "b.pgm", gradient((16, 16)))
    with pytest.raises(DimensionMismatch):
        load_frame_sequence(tmp_path)


def test_undecodable_file_names_culprit(tmp_path):
    make_pgm(tmp_path / "a.pgm", gradient((16, 16)))
    bad = tmp_path / "b.png"
    bad.write_bytes(b"not a png at all")
    with pytest.raises(DecodeError) as err:
        load_frame_sequence(tmp_path)
    assert "b.png" in str(err.value)


def test_load_is_idempotent(tmp_path):
    make_pgm(tmp_path / "a.pgm", gradient((16, 16)))
    first = load_frame(tmp_path / "a.pgm").pixels
    second = load_frame(tmp_path / "a.pgm").pixels
    assert np.array_equal(first, second)


def test_png_roundtrip_8bit(tmp_path):
    values = gradient((16, 16))
    write_gray_image(values / 255.0, tmp_path / "a.png")
    frame = load_frame(tmp_path / "a.png")
    assert np.array_equal(frame.pixels, values / 255.0)


def test_png_16bit(tmp_path):
    from PIL import Image

    values = (np.arange(256, dtype=np.uint32).reshape(16, 16) * 257).astype(np.uint16)
    Image.fromarray(values).save(tmp_path / "a.png")
    frame = load_frame(tmp_path / "a.png")
    assert np.array_equal(frame.pixels, values.astype(np.float64) / 65535.0)


def test_png_color_uses_rec601_luma(tmp_path):
    from PIL import Image

    rgb = np.zeros((16, 16, 3), dtype=np.uint8)
    rgb[:, :, 0] = 200
    rgb[:, :, 1] = 100
    rgb[:, :, 2] = 50
    Image.fromarray(rgb, mode="RGB").save(tmp_path / "a.png")
    frame = load_frame(tmp_path / "a.png")
    expected = (0.299 * 200 + 0.587 * 100 + 0.114 * 50) / 255.0
    assert np.allclose(frame.pixels, expected, atol=1e-12)


def test_frame_invariants():
    with pytest.raises(ValueError):
        Frame(np.zeros((8, 8)))  # too small
    with pytest.raises(ValueError):
        Frame(np.full((16, 16), 1.5))
    with pytest.raises(ValueError):
        Frame(np.full((16, 16), np.nan))


def test_landmarks_roundtrip(tmp_path):
    lm = face_landmarks()
    write_landmarks(lm, tmp_path / "lm.json")
    parsed = parse_landmarks(tmp_path / "lm.json")
    assert np.array_equal(parsed.points, lm.points)
    assert parsed.image_width == 160 and parsed.image_height == 160
    # point 30 is the nose tip row from the file
    assert tuple(parsed.points[30]) == tuple(lm.points[30])


def test_landmarks_wrong_count(tmp_path):
    payload = {"image_width": 100, "image_height": 100, "points": [[1.0, 1.0]] * 67}
    (tmp_path / "lm.json").write_text(json.dumps(payload))
    with pytest.raises(LandmarkCountError) as err:
        parse_landmarks(tmp_path / "lm.json")
    assert err.value.found == 67


def test_landmarks_index_keyed_order_free(tmp_path):
    lm = face_landmarks()
    entries = [
        {"index": i, "x": float(x), "y": float(y)}
        for i, (x, y) in enumerate(lm.points)
    ]
    payload = {"image_width": 160, "image_height": 160, "points": entries[::-1]}
    (tmp_path / "lm.json").write_text(json.dumps(payload))
    parsed = parse_landmarks(tmp_path / "lm.json")
    assert np.array_equal(parsed.points, lm.points)


def test_flow_file_layout(tmp_path):
    field = FlowField(np.array([[1.0, 0.0]]), np.array([[0.0, 1.0]]))
    path = tmp_path / "f.flo"
    write_flow_file(field, path)
    data = path.read_bytes()
    assert data[:4] == FLOW_MAGIC == b"PIEH"
    assert len(data) == 4 + 8 + 16


def test_flow_file_roundtrip_bit_exact(tmp_path):
    rng = np.random.default_rng(7)
    u = rng.standard_normal((8, 8)).astype(np.float32).astype(np.float64)
    v = rng.standard_normal((8, 8)).astype(np.float32).astype(np.float64)
    path = tmp_path / "f.flo"
    write_flow_file(FlowField(u, v), path)
    back = read_flow_file(path)
    assert np.array_equal(back.u, u)
    assert np.array_equal(back.v, v)


def sample_report():
    regions = (
        RegionScore("forehead", 0.01, 0.01, 0.0, 1.0, 2600, 2600),
        RegionScore("eye", 0.02, 0.02, 0.0, 1.0, 950, 950),
        RegionScore("cheek", 0.25, 0.25 - 0.42 / 3.8, 0.42 / 3.8, 0.58, 4800, 4700),
    )
    return SymmetryReport(
        regions=regions, n_frames=6, config=ScoreConfig(), flow_params=FlowParams()
    )


def test_report_csv_row_for_cheek():
    csv_text = format_report_csv(sample_report())
    lines = csv_text.strip().split("\n")
    assert lines[0] == "region,v_left,v_right,delta_v,s_s"
    cheek = [l for l in lines if l.startswith("cheek,")]
    assert len(cheek) == 1
    assert cheek[0].endswith(",0.58")


def test_report_serialization_deterministic(tmp_path):
    report = sample_report()
    write_report(report, "json", tmp_path / "a.json")
    write_report(report, "json", tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    write_report(report, "csv", tmp_path / "a.csv")
    write_report(report, "csv", tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_report_json_roundtrip(tmp_path):
    report = sample_report()
    write_report(report, "json", tmp_path / "r.json")
    assert read_report(tmp_path / "r.json") == report


def test_write_pgm_roundtrip(tmp_path):
    values = gradient((16, 16))
    write_pgm(values / 255.0, tmp_path / "a.pgm")
    assert np.array_equal(load_frame(tmp_path / "a.pgm").pixels, values / 255.0)
