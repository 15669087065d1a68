"""ArUco detection over video, emitting the pipeline's detections format.

Each detected marker yields one line (timestamp, camera_id, marker_id, tvec,
rvec) with the timestamp derived from the frame index and the profile's
nominal fps; the synchronization stage downstream absorbs the resulting
constant clock offset.
"""

from __future__ import annotations

from dataclasses import dataclass

import cv2
import numpy as np

from .errors import AdapterError, ProfileError
from .profile import CameraProfile

DETECTIONS_MAGIC = "# markerloc detections v1"
DETECTION_COLUMNS = "timestamp camera_id marker_id tx ty tz rx ry rz"

DICTIONARIES = {
    "4x4_50": cv2.aruco.DICT_4X4_50,
    "5x5_100": cv2.aruco.DICT_5X5_100,
    "6x6_250": cv2.aruco.DICT_6X6_250,
    "7x7_250": cv2.aruco.DICT_7X7_250,
}
DEFAULT_DICTIONARY = "6x6_250"


@dataclass
class DetectionSummary:
    frames: int
    detections: int


def make_detector(dictionary: str = DEFAULT_DICTIONARY) -> cv2.aruco.ArucoDetector:
    if dictionary not in DICTIONARIES:
        raise AdapterError(f"unknown marker dictionary {dictionary!r}")
    params = cv2.aruco.DetectorParameters()
    params.cornerRefinementMethod = cv2.aruco.CORNER_REFINE_SUBPIX
    return cv2.aruco.ArucoDetector(
        cv2.aruco.getPredefinedDictionary(DICTIONARIES[dictionary]), params)


def marker_object_points(edge_length: float) -> np.ndarray:
    """Square corners in the marker frame (x right, y up, z out of plane),
    ordered like the detector's image corners."""
    half = edge_length / 2.0
    return np.array([
        [-half, half, 0.0],
        [half, half, 0.0],
        [half, -half, 0.0],
        [-half, -half, 0.0],
    ], dtype=np.float32)


def detect_frame(image, detector, profile: CameraProfile, edge_length: float):
    """Marker poses in one frame: list of (marker_id, tvec, rvec)."""
    if image.ndim == 3:
        image = cv2.cvtColor(image, cv2.COLOR_BGR2GRAY)
    if profile.upside_down:
        image = cv2.rotate(image, cv2.ROTATE_180)
    corners, ids, _ = detector.detectMarkers(image)
    if ids is None:
        return []
    obj = marker_object_points(edge_length)
    distortion = profile.distortion if profile.distortion.size else None
    out = []
    for marker_corners, marker_id in zip(corners, ids.ravel()):
        ok, rvec, tvec = cv2.solvePnP(
            obj, marker_corners, profile.camera_matrix, distortion,
            flags=cv2.SOLVEPNP_IPPE_SQUARE)
        if not ok:
            continue
        rvec, tvec = cv2.solvePnPRefineLM(
            obj, marker_corners, profile.camera_matrix, distortion, rvec, tvec)
        out.append((int(marker_id), tvec.ravel(), rvec.ravel()))
    return out


def detect_video(
    video_path,
    profile: CameraProfile,
    edge_length: float,
    out_path,
    stride: int = 1,
    dictionary: str = DEFAULT_DICTIONARY,
) -> DetectionSummary:
    """Run detection over a video file and write the detections file.

    Timestamps are frame_index / fps on the camera's own clock. stride > 1
    subsamples frames; edge_length is the printed marker size in meters.
    """
    if not isinstance(profile, CameraProfile):
        raise ProfileError("a calibrated CameraProfile is required")
    if edge_length <= 0:
        raise AdapterError("edge_length must be positive")
    if stride < 1:
        raise AdapterError("stride must be >= 1")
    capture = cv2.VideoCapture(str(video_path))
    if not capture.isOpened():
        raise AdapterError(f"cannot open video {video_path}")

    detector = make_detector(dictionary)
    frames = 0
    detections = 0
    with open(out_path, "w", encoding="utf-8") as handle:
        handle.write(DETECTIONS_MAGIC + "\n")
        handle.write("# columns: " + DETECTION_COLUMNS + "\n")
        handle.write("# units: s - - m m m rad rad rad\n")
        frame_index = 0
        while True:
            ok, frame = capture.read()
            if not ok:
                break
            if frame_index % stride == 0:
                frames += 1
                timestamp = frame_index / profile.fps
                for marker_id, tvec, rvec in detect_frame(
                        frame, detector, profile, edge_length):
                    handle.write(" ".join(
                        [repr(timestamp), str(profile.camera_id),
                         str(marker_id)]
                        + [repr(float(v)) for v in tvec]
                        + [repr(float(v)) for v in rvec]
                    ) + "\n")
                    detections += 1
            frame_index += 1
    capture.release()
    return DetectionSummary(frames=frames, detections=detections)
