"""Rotation algebra and recovery of world-frame camera poses from marker detections.

Rotations travel as rotation vectors (axis-angle, norm = angle in radians)
and are expanded to 3x3 matrices only where products are needed. All
translations are meters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidRotationError, UnknownMarkerError

ROTATION_TOL = 1e-9

# Below this ||rho||, sin(theta) is treated as zero and the branch is picked
# by the sign of d = (trace - 1) / 2.
_SINGULAR_S = 1e-10


def as_vec3(v) -> np.ndarray:
    """Coerce to a finite float vector of shape (3,)."""
    a = np.asarray(v, dtype=float).reshape(3)
    if not np.all(np.isfinite(a)):
        raise ValueError("vector components must be finite")
    return a


@dataclass(eq=False)
class MarkerSpec:
    """A stationary fiducial: label plus surveyed world-frame pose."""

    id: int
    position: np.ndarray   # marker center in world frame, meters
    rotation: np.ndarray   # world rotation vector
    edge_length: float = 0.3

    def __post_init__(self):
        self.position = as_vec3(self.position)
        self.rotation = as_vec3(self.rotation)
        self.edge_length = float(self.edge_length)
        if self.edge_length <= 0:
            raise ValueError("marker edge_length must be positive")


@dataclass(eq=False)
class MarkerObservation:
    """One marker detection in one video frame, posed relative to the camera."""

    timestamp: float
    camera_id: int
    marker_id: int
    position: np.ndarray   # tvec, camera frame
    rotation: np.ndarray   # rvec, camera frame

    def __post_init__(self):
        self.timestamp = float(self.timestamp)
        self.camera_id = int(self.camera_id)
        self.marker_id = int(self.marker_id)
        self.position = as_vec3(self.position)
        self.rotation = as_vec3(self.rotation)


@dataclass(eq=False)
class RawPose:
    """Camera-bundle pose recovered from a single detection, before pruning."""

    timestamp: float
    position: np.ndarray   # world frame
    rotation: np.ndarray   # world rotation vector
    source_marker: int
    marker_distance: float  # range to the marker that produced this pose

    def __post_init__(self):
        self.timestamp = float(self.timestamp)
        self.position = as_vec3(self.position)
        self.rotation = as_vec3(self.rotation)
        if self.marker_distance < 0:
            raise ValueError("marker_distance must be non-negative")


def skew(v) -> np.ndarray:
    """Skew-symmetric cross-product matrix of a 3-vector."""
    x, y, z = np.asarray(v, dtype=float).reshape(3)
    return np.array([
        [0.0, -z, y],
        [z, 0.0, -x],
        [-y, x, 0.0],
    ])


def rodrigues(r) -> np.ndarray:
    """Rotation vector to rotation matrix.

    R = I cos(theta) + (1 - cos(theta)) rr^T + sin(theta) [r]x with the
    normalized axis r; the zero vector maps to the identity.
    """
    r = as_vec3(r)
    theta = float(np.linalg.norm(r))
    if theta < 1e-12:
        # second-order series; error O(theta^3) is far below ROTATION_TOL
        k = skew(r)
        return np.eye(3) + k + 0.5 * (k @ k)
    axis = r / theta
    c, s = np.cos(theta), np.sin(theta)
    return np.eye(3) * c + (1.0 - c) * np.outer(axis, axis) + s * skew(axis)


def validate_rotation(matrix) -> np.ndarray:
    """Check the rotation-matrix invariants, returning the validated array."""
    m = np.asarray(matrix, dtype=float)
    if m.shape != (3, 3) or not np.all(np.isfinite(m)):
        raise InvalidRotationError("rotation matrix must be a finite 3x3 array")
    if np.max(np.abs(m.T @ m - np.eye(3))) > ROTATION_TOL:
        raise InvalidRotationError("matrix is not orthonormal within 1e-9")
    if abs(np.linalg.det(m) - 1.0) > ROTATION_TOL:
        raise InvalidRotationError("matrix determinant is not +1 within 1e-9")
    return m


def rodrigues_inv(matrix) -> np.ndarray:
    """Rotation matrix back to a rotation vector with norm <= pi.

    The half-turn representative (theta = pi) is canonicalized so that the
    first nonzero component is positive.
    """
    m = validate_rotation(matrix)
    a = (m - m.T) / 2.0
    rho = np.array([a[2, 1], a[0, 2], a[1, 0]])
    s = float(np.linalg.norm(rho))
    d = float(np.clip((np.trace(m) - 1.0) / 2.0, -1.0, 1.0))
    if s < _SINGULAR_S:
        if d > 0.0:
            return np.zeros(3)
        # theta = pi: recover the axis from the dominant column of R + I
        b = m + np.eye(3)
        col = int(np.argmax(np.linalg.norm(b, axis=0)))
        v = b[:, col]
        r = v / np.linalg.norm(v) * np.pi
        return _half_turn_canonical(r)
    theta = float(np.arctan2(s, d))
    return rho / s * theta


def _half_turn_canonical(r: np.ndarray) -> np.ndarray:
    for component in r:
        if abs(component) > 1e-12:
            return r if component > 0 else -r
    return r


def transform_vector(matrix, v) -> np.ndarray:
    """Re-express a vector in another frame: matrix @ v."""
    return np.asarray(matrix, dtype=float) @ as_vec3(v)


def compose_rotations(r_kj, r_ji) -> np.ndarray:
    """Chain two rotations: frame i -> j -> k."""
    return np.asarray(r_kj, dtype=float) @ np.asarray(r_ji, dtype=float)


def camera_pose(obs: MarkerObservation, marker: MarkerSpec) -> RawPose:
    """Recover the world-frame camera-bundle pose from one detection.

    position = t_w_m - R_w_m (R_c_m)^T t_c_m, and the rotation vector is the
    inverse Rodrigues image of R_w_m (R_c_m)^T.
    """
    if obs.marker_id != marker.id:
        raise UnknownMarkerError(
            f"observation references marker {obs.marker_id}, got spec for {marker.id}"
        )
    r_w_m = rodrigues(marker.rotation)
    r_c_m = rodrigues(obs.rotation)
    r_w_c = r_w_m @ r_c_m.T
    position = marker.position - r_w_c @ obs.position
    rotation = rodrigues_inv(r_w_c)
    return RawPose(
        timestamp=obs.timestamp,
        position=position,
        rotation=rotation,
        source_marker=marker.id,
        marker_distance=float(np.linalg.norm(obs.position)),
    )
