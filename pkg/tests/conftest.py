import pytest

from synthfaces import (
    face_landmarks,
    moving_sequence,
    static_sequence,
    write_landmark_file,
    write_sequence,
)

# (kind, amplitude) for the induced-asymmetry suite; the kind names the band
# that contains the motion.
MOVING_CASES = [
    ("cheek", 2.5),
    ("cheek", 1.8),
    ("eye", 0.2),
    ("eye", 0.35),
    ("forehead", 2.0),
]


@pytest.fixture(scope="session")
def face_lm():
    return face_landmarks()


@pytest.fixture(scope="session")
def static_seq():
    return static_sequence(5)


@pytest.fixture(scope="session")
def moving_seqs():
    return {(kind, amp): moving_sequence(kind, amp=amp) for kind, amp in MOVING_CASES}


@pytest.fixture(scope="session")
def cli_fixtures(tmp_path_factory, face_lm):
    """On-disk frame directories and landmark JSON for CLI/service tests."""
    root = tmp_path_factory.mktemp("cli_fixtures")
    static_dir = root / "static"
    write_sequence(static_sequence(4), static_dir)
    moving_dir = root / "moving"
    write_sequence(moving_sequence("cheek", amp=2.5), moving_dir)
    single_dir = root / "single"
    single_dir.mkdir()
    first = sorted(static_dir.iterdir())[0]
    (single_dir / first.name).write_bytes(first.read_bytes())
    lm_path = root / "lm.json"
    write_landmark_file(face_lm, lm_path)
    return {
        "root": root,
        "static": static_dir,
        "moving": moving_dir,
        "single": single_dir,
        "landmarks": lm_path,
    }
