"""Charuco-chart camera calibration producing a CameraProfile."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import cv2
import numpy as np

from .detect import DICTIONARIES, DEFAULT_DICTIONARY
from .errors import AdapterError, CalibrationError
from .profile import CameraProfile

MIN_VIEWS = 10
MIN_CORNERS_PER_VIEW = 6


@dataclass
class CalibrationResult:
    profile: CameraProfile
    reprojection_error: float  # RMS pixels
    views_used: int


def make_board(squares=(8, 6), square_length=0.05, marker_length=0.037,
               dictionary: str = DEFAULT_DICTIONARY) -> cv2.aruco.CharucoBoard:
    if dictionary not in DICTIONARIES:
        raise AdapterError(f"unknown marker dictionary {dictionary!r}")
    return cv2.aruco.CharucoBoard(
        tuple(squares), square_length, marker_length,
        cv2.aruco.getPredefinedDictionary(DICTIONARIES[dictionary]))


def _gather_images(source) -> list[np.ndarray]:
    """Accept a video file, a directory of images, or a list of arrays."""
    if isinstance(source, (list, tuple)) and source \
            and isinstance(source[0], np.ndarray):
        return list(source)
    path = Path(source)
    if path.is_dir():
        images = []
        for item in sorted(path.iterdir()):
            image = cv2.imread(str(item), cv2.IMREAD_GRAYSCALE)
            if image is not None:
                images.append(image)
        return images
    capture = cv2.VideoCapture(str(path))
    if not capture.isOpened():
        raise AdapterError(f"cannot open calibration source {source}")
    images = []
    while True:
        ok, frame = capture.read()
        if not ok:
            break
        images.append(cv2.cvtColor(frame, cv2.COLOR_BGR2GRAY))
    capture.release()
    return images


def calibrate(
    source,
    board: cv2.aruco.CharucoBoard | None = None,
    fps: float = 60.0,
    camera_id: int = 0,
    upside_down: bool = False,
    min_views: int = MIN_VIEWS,
) -> CalibrationResult:
    """Estimate intrinsics and distortion from Charuco chart views.

    source may be a video path, an image directory, or a list of grayscale
    arrays. Fewer than min_views usable views is an error.
    """
    board = board or make_board()
    images = _gather_images(source)
    if not images:
        raise CalibrationError("no calibration images found")
    detector = cv2.aruco.CharucoDetector(board)

    object_points, image_points = [], []
    image_size = None
    for image in images:
        if image.ndim == 3:
            image = cv2.cvtColor(image, cv2.COLOR_BGR2GRAY)
        image_size = (image.shape[1], image.shape[0])
        charuco_corners, charuco_ids, _, _ = detector.detectBoard(image)
        if charuco_corners is None or len(charuco_corners) < MIN_CORNERS_PER_VIEW:
            continue
        obj, img = board.matchImagePoints(charuco_corners, charuco_ids)
        object_points.append(obj)
        image_points.append(img)

    if len(object_points) < min_views:
        raise CalibrationError(
            f"only {len(object_points)} usable chart views, need {min_views}"
        )
    rms, camera_matrix, distortion, _, _ = cv2.calibrateCamera(
        object_points, image_points, image_size, None, None)
    profile = CameraProfile(camera_matrix, distortion.ravel(), fps,
                            camera_id, upside_down)
    return CalibrationResult(profile=profile, reprojection_error=float(rms),
                             views_used=len(object_points))
