"""Camera profiles: intrinsics, distortion, frame rate, mount orientation.

Stored as a key-value text file with a magic version line, matching the
pipeline's config style. One camera of the back-to-back bundle records
upside down; its frames are rotated before detection.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ProfileError

PROFILE_MAGIC = "# markerloc camera-profile v1"


@dataclass
class CameraProfile:
    camera_matrix: np.ndarray          # 3x3 intrinsics
    distortion: np.ndarray = field(default_factory=lambda: np.zeros(5))
    fps: float = 60.0
    camera_id: int = 0
    upside_down: bool = False

    def __post_init__(self):
        self.camera_matrix = np.asarray(self.camera_matrix,
                                        dtype=float).reshape(3, 3)
        self.distortion = np.asarray(self.distortion, dtype=float).ravel()
        if not np.all(np.isfinite(self.camera_matrix)):
            raise ProfileError("camera matrix must be finite")
        if self.camera_matrix[0, 0] <= 0 or self.camera_matrix[1, 1] <= 0:
            raise ProfileError("focal lengths must be positive; "
                               "is the profile calibrated?")
        if self.fps <= 0:
            raise ProfileError("fps must be positive")


def write_profile(path, profile: CameraProfile) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(PROFILE_MAGIC + "\n")
        handle.write("camera_matrix = "
                     + " ".join(repr(float(v))
                                for v in profile.camera_matrix.ravel())
                     + "\n")
        handle.write("distortion = "
                     + " ".join(repr(float(v)) for v in profile.distortion)
                     + "\n")
        handle.write(f"fps = {float(profile.fps)!r}\n")
        handle.write(f"camera_id = {profile.camera_id}\n")
        handle.write(f"upside_down = {str(profile.upside_down).lower()}\n")


def read_profile(path) -> CameraProfile:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        raise ProfileError(f"cannot read profile: {exc}") from exc
    if not lines or lines[0].strip() != PROFILE_MAGIC:
        raise ProfileError(f"{path}: expected magic line {PROFILE_MAGIC!r}")
    values: dict[str, str] = {}
    for line in lines[1:]:
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ProfileError(f"{path}: expected 'key = value', got {stripped!r}")
        key, value = stripped.split("=", 1)
        values[key.strip()] = value.strip()
    try:
        matrix = np.array([float(v) for v in values["camera_matrix"].split()])
        distortion = np.array([float(v) for v in values["distortion"].split()])
        fps = float(values["fps"])
        camera_id = int(values.get("camera_id", "0"))
        upside_down = values.get("upside_down", "false").lower() in (
            "true", "1", "yes")
    except (KeyError, ValueError) as exc:
        raise ProfileError(f"{path}: malformed profile: {exc}") from exc
    if matrix.size != 9:
        raise ProfileError(f"{path}: camera_matrix needs 9 entries")
    return CameraProfile(matrix.reshape(3, 3), distortion, fps, camera_id,
                         upside_down)
