"""Calibration on synthetic chart renders."""

import numpy as np
import pytest

from markerloc_adapter import CalibrationError, calibrate, make_board
from markerloc_adapter import read_profile, write_profile
from conftest import facing_rvec, render_patch, write_clip

BOARD = make_board((8, 6), 0.05, 0.037)
BOARD_SPAN = (8 * 0.05, 6 * 0.05)
BOARD_IMAGE = BOARD.generateImage((800, 600), marginSize=0)


def render_views(camera_matrix, count, seed=0):
    rng = np.random.default_rng(seed)
    views = []
    for _ in range(count):
        rvec = facing_rvec(rng.normal(0.0, 0.25, 3))
        tvec = np.array([rng.uniform(-0.26, -0.14), rng.uniform(0.1, 0.2),
                         rng.uniform(0.8, 1.3)])
        views.append(render_patch(BOARD_IMAGE, BOARD_SPAN, rvec, tvec,
                                  camera_matrix))
    return views


def test_recovers_focal_length_within_one_percent(camera_matrix):
    views = render_views(camera_matrix, 14)
    result = calibrate(views, board=BOARD, fps=60.0)
    fx = result.profile.camera_matrix[0, 0]
    fy = result.profile.camera_matrix[1, 1]
    assert abs(fx - 800.0) / 800.0 < 0.01
    assert abs(fy - 800.0) / 800.0 < 0.01
    assert result.reprojection_error < 1.0
    assert result.views_used >= 10


def test_too_few_views_rejected(camera_matrix):
    views = render_views(camera_matrix, 3)
    with pytest.raises(CalibrationError):
        calibrate(views, board=BOARD)


def test_blank_views_do_not_count(camera_matrix):
    views = render_views(camera_matrix, 6)
    views += [np.full((720, 960), 255, np.uint8)] * 10
    with pytest.raises(CalibrationError):
        calibrate(views, board=BOARD)


def test_calibration_from_video(tmp_path, camera_matrix):
    views = render_views(camera_matrix, 12, seed=3)
    clip = tmp_path / "chart.avi"
    write_clip(clip, views, fps=30.0)
    result = calibrate(clip, board=BOARD, fps=30.0)
    assert abs(result.profile.camera_matrix[0, 0] - 800.0) / 800.0 < 0.01


def test_profile_file_roundtrip(tmp_path, camera_matrix):
    result = calibrate(render_views(camera_matrix, 12, seed=5), board=BOARD,
                       fps=60.0, camera_id=1, upside_down=True)
    path = tmp_path / "camera.profile"
    write_profile(path, result.profile)
    loaded = read_profile(path)
    np.testing.assert_array_equal(loaded.camera_matrix,
                                  result.profile.camera_matrix)
    assert loaded.upside_down is True
