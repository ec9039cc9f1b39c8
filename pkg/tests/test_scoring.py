import numpy as np
import pytest

from facesym import (
    CalibrationUnderdetermined,
    DegenerateRegion,
    InvalidParams,
    ScoreConfig,
    calibrate_lambda,
    movement_score,
    score_sequence,
    symmetry_score,
    threshold_magnitudes,
)
from facesym.scoring import worker_count
from synthfaces import static_sequence

# Reference point of the score line: at lambda=3.8 this delta maps to S=0.58.
CHEEK_DELTA = 0.42 / 3.8


def brute_force_movement(mags, mask, n_frames):
    """Independent double-loop evaluation of the movement sum."""
    m = 0
    for row in mask:
        for cell in row:
            m += bool(cell)
    total = 0.0
    for mag in mags:
        for y in range(mag.shape[0]):
            for x in range(mag.shape[1]):
                if mask[y, x]:
                    total += mag[y, x]
    return total / (m * (n_frames - 1))


def test_threshold_all_zero_unchanged():
    mag = np.zeros((10, 10))
    out = threshold_magnitudes(mag, 6.0)
    assert np.array_equal(out, mag)


def test_threshold_sparse_peak_survives():
    mag = np.zeros((10, 10))
    mag[3, 4] = 1.0
    out = threshold_magnitudes(mag, 6.0)
    # mean 0.01 -> threshold 0.06; the peak stays, zeros stay zero
    assert out[3, 4] == 1.0
    assert out.sum() == 1.0


def test_threshold_uniform_map_zeroed():
    mag = np.full((8, 8), 0.3)
    out = threshold_magnitudes(mag, 6.0)
    assert np.array_equal(out, np.zeros((8, 8)))


def test_threshold_factor_zero_is_noop():
    rng = np.random.default_rng(0)
    mag = rng.random((6, 6))
    assert np.array_equal(threshold_magnitudes(mag, 0.0), mag)


def test_threshold_never_increases():
    rng = np.random.default_rng(1)
    mag = rng.random((12, 12))
    out = threshold_magnitudes(mag, 6.0)
    assert np.all(out <= mag)


def test_movement_constant_maps():
    mags = [np.full((6, 6), 0.2) for _ in range(4)]
    mask = np.zeros((6, 6), dtype=bool)
    mask[1:4, 2:5] = True
    assert movement_score(mags, mask, 5) == pytest.approx(0.2, abs=1e-15)


def test_movement_single_pixel_case():
    mags = [np.zeros((4, 4)), np.zeros((4, 4))]
    mags[0][1, 1] = 1.0
    mask = np.zeros((4, 4), dtype=bool)
    mask[0:2, 0:2] = True  # M = 4
    assert movement_score(mags, mask, 3) == pytest.approx(0.125, abs=1e-15)


def test_movement_matches_brute_force():
    rng = np.random.default_rng(2)
    for _ in range(10):
        n = int(rng.integers(2, 6))
        h, w = int(rng.integers(3, 9)), int(rng.integers(3, 9))
        mags = [rng.random((h, w)) for _ in range(n - 1)]
        mask = rng.random((h, w)) > 0.4
        if not mask.any():
            mask[0, 0] = True
        fast = movement_score(mags, mask, n)
        slow = brute_force_movement(mags, mask, n)
        assert abs(fast - slow) < 1e-12


def test_movement_empty_mask_degenerate():
    with pytest.raises(DegenerateRegion):
        movement_score([np.zeros((4, 4))], np.zeros((4, 4), dtype=bool), 2)


def test_movement_wrong_map_count():
    with pytest.raises(ValueError):
        movement_score([np.zeros((4, 4))], np.ones((4, 4), dtype=bool), 3)


def test_movement_linear_in_scale():
    rng = np.random.default_rng(3)
    mags = [rng.random((7, 7)) for _ in range(3)]
    mask = rng.random((7, 7)) > 0.5
    base = movement_score(mags, mask, 4)
    scaled = movement_score([2.5 * m for m in mags], mask, 4)
    assert scaled == pytest.approx(2.5 * base, rel=1e-12)


def test_movement_invariant_under_value_permutation():
    rng = np.random.default_rng(4)
    mag = rng.random((6, 6))
    mask = rng.random((6, 6)) > 0.5
    mask[0, 0] = True
    permuted = mag.copy()
    values = permuted[mask]
    permuted[mask] = values[::-1]
    assert movement_score([mag], mask, 2) == pytest.approx(
        movement_score([permuted], mask, 2), rel=1e-12
    )


def test_symmetry_equal_sides_is_one():
    assert symmetry_score(0.37, 0.37, 3.8) == 1.0


def test_symmetry_reference_point():
    assert symmetry_score(0.25 + CHEEK_DELTA, 0.25, 3.8) == pytest.approx(0.58, abs=1e-6)


def test_symmetry_clamps_to_zero():
    assert symmetry_score(0.9, 0.3, 3.8) == 0.0


def test_symmetry_is_commutative_and_bounded():
    rng = np.random.default_rng(5)
    for _ in range(200):
        a, b = rng.random(2) * 2.0
        lam = rng.random() * 10 + 0.01
        s = symmetry_score(a, b, lam)
        assert 0.0 <= s <= 1.0
        assert s == symmetry_score(b, a, lam)


def test_calibrate_single_reference_sample():
    assert calibrate_lambda([(CHEEK_DELTA, 0.58)]) == pytest.approx(3.8, abs=1e-6)
    # with the rounded published delta the fit still lands near 3.8
    assert calibrate_lambda([(0.110526, 0.58)]) == pytest.approx(3.8, abs=1e-4)


def test_calibrate_needs_informative_sample():
    with pytest.raises(CalibrationUnderdetermined):
        calibrate_lambda([(0.0, 0.5), (0.0, 0.9)])
    with pytest.raises(CalibrationUnderdetermined):
        calibrate_lambda([(0.2, 1.0)])  # d > 0 but expert sees no asymmetry


def test_calibrate_recovers_generating_slope():
    true_lambda = 2.7
    deltas = [0.05, 0.1, 0.2]
    samples = [(d, 1.0 - true_lambda * d) for d in deltas]
    assert calibrate_lambda(samples) == pytest.approx(true_lambda, abs=1e-9)


def test_score_config_validation():
    with pytest.raises(InvalidParams):
        ScoreConfig(lambda_=0.0).validate()
    with pytest.raises(InvalidParams):
        ScoreConfig(threshold_factor=-1.0).validate()


def test_static_sequence_scores_perfectly(face_lm):
    report = score_sequence(static_sequence(3), face_lm)
    for r in report.regions:
        assert r.v_left < 1e-3 and r.v_right < 1e-3
        assert r.s_s == 1.0
        assert r.delta_v == abs(r.v_left - r.v_right)


def test_symmetric_motion_scores_high(face_lm, moving_seqs):
    report = score_sequence(moving_seqs[("cheek", 2.5)], face_lm)
    for r in report.regions:
        assert r.s_s >= 0.95


def test_score_sequence_deterministic(face_lm, static_seq):
    first = score_sequence(static_seq, face_lm)
    second = score_sequence(static_seq, face_lm)
    assert first == second


def test_worker_count_env_override(monkeypatch):
    monkeypatch.setenv("FACESYM_THREADS", "2")
    assert worker_count(8) == 2
    monkeypatch.setenv("FACESYM_THREADS", "0")
    assert worker_count(8) == 1
    monkeypatch.setenv("FACESYM_THREADS", "16")
    assert worker_count(3) == 3
    monkeypatch.setenv("FACESYM_THREADS", "junk")
    with pytest.raises(InvalidParams):
        worker_count(4)
