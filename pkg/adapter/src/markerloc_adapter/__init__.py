"""Video front-end for the markerloc pipeline: ArUco marker detection and
Charuco camera calibration, writing the pipeline's detections file format."""

from .calibrate import CalibrationResult, calibrate, make_board
from .detect import DetectionSummary, detect_frame, detect_video, make_detector
from .errors import AdapterError, CalibrationError, ProfileError
from .profile import CameraProfile, read_profile, write_profile

__version__ = "0.1.0"

__all__ = [
    "AdapterError",
    "CalibrationError",
    "CalibrationResult",
    "CameraProfile",
    "DetectionSummary",
    "ProfileError",
    "calibrate",
    "detect_frame",
    "detect_video",
    "make_board",
    "make_detector",
    "read_profile",
    "write_profile",
]
