"""Kalman smoothing of 6-D pose observations with identity dynamics.

The state is the stacked [position, rotation-vector] and both the transition
and observation maps are the identity, so the filter reduces to exponential
blending with gain set by the noise multipliers q (measurement) and r
(transition).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import OrderingError

log = logging.getLogger(__name__)

STATE_DIM = 6

# Rotation vectors this close to the wrap singularity at pi make Euclidean
# filtering unreliable; such trajectories are flagged once.
_WRAP_MARGIN = 0.15


@dataclass
class FilterParams:
    """Noise multipliers: Q = q I (measurement), R = r I (transition)."""

    q: float = 0.2
    r: float = 0.01
    initial_covariance: float = 1.0

    def __post_init__(self):
        if self.q < 0 or self.r < 0:
            raise ValueError("noise multipliers must be non-negative")
        if self.q == 0 and self.r == 0:
            raise ValueError("q and r must not both be zero")
        if self.initial_covariance < 0:
            raise ValueError("initial_covariance must be non-negative")


@dataclass(eq=False)
class PoseState:
    """Filter posterior: mean x (6,), covariance P (6,6)."""

    x: np.ndarray
    P: np.ndarray
    timestamp: float


@dataclass(eq=False)
class FinalPose:
    """Smoothed camera-bundle pose emitted per frame timestamp."""

    timestamp: float
    position: np.ndarray
    rotation: np.ndarray


def pose_vector(pose) -> np.ndarray:
    """Stack a pose into the 6-vector observation [position, rotation]."""
    return np.concatenate([pose.position, pose.rotation])


def kalman_step(state: PoseState, y, params: FilterParams) -> PoseState:
    """One predict/update cycle with A = H = I.

    Predict: x_hat = x, P_hat = P + rI. Update: K = P_hat (P_hat + qI)^-1,
    x' = x_hat + K (y - x_hat), P' = (I - K) P_hat.
    """
    y = np.asarray(y, dtype=float).reshape(STATE_DIM)
    if not np.all(np.isfinite(y)):
        raise ValueError("observation must be finite")
    eye = np.eye(STATE_DIM)
    p_hat = state.P + params.r * eye
    innovation_cov = p_hat + params.q * eye
    gain = np.linalg.solve(innovation_cov.T, p_hat.T).T
    x = state.x + gain @ (y - state.x)
    p = (eye - gain) @ p_hat
    p = (p + p.T) / 2.0
    return PoseState(x=x, P=p, timestamp=state.timestamp)


def smooth_trajectory(likely_poses, params: FilterParams, x0=None) -> list[FinalPose]:
    """Filter a time-ordered stream of likely poses into per-frame final poses.

    Every pose is fed as an individual observation; one FinalPose is emitted
    per distinct frame timestamp, holding the posterior after the last
    observation at that timestamp. x0 defaults to the first pose.
    """
    poses = list(likely_poses)
    if not poses:
        return []
    for earlier, later in zip(poses, poses[1:]):
        if later.timestamp < earlier.timestamp:
            raise OrderingError(
                f"likely poses not sorted by timestamp near t={later.timestamp}"
            )
    if any(np.linalg.norm(p.rotation) > np.pi - _WRAP_MARGIN for p in poses):
        log.warning(
            "rotation vectors approach the pi wrap singularity; "
            "Euclidean smoothing of rotations may be unreliable"
        )

    if x0 is None:
        x0 = pose_vector(poses[0])
    state = PoseState(
        x=np.asarray(x0, dtype=float).reshape(STATE_DIM),
        P=params.initial_covariance * np.eye(STATE_DIM),
        timestamp=poses[0].timestamp,
    )

    out: list[FinalPose] = []
    i = 0
    while i < len(poses):
        frame_time = poses[i].timestamp
        while i < len(poses) and poses[i].timestamp == frame_time:
            state = kalman_step(state, pose_vector(poses[i]), params)
            i += 1
        state.timestamp = frame_time
        out.append(FinalPose(frame_time, state.x[:3].copy(), state.x[3:].copy()))
    return out
