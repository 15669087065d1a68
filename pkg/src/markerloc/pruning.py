"""Frame-batch windowing and the two pose-elimination strategies.

Raw poses are processed in windows of F distinct frame timestamps. Within a
batch, close-marker selection keeps the C poses from the nearest markers and
greedy consensus elimination removes the farthest pose from the mean until U
survive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OrderingError
from .geometry import RawPose


@dataclass(eq=False)
class PoseBatch:
    """Raw poses from one window of frame_window distinct frame timestamps."""

    frame_window: int
    poses: list[RawPose]
    start_time: float
    end_time: float


@dataclass
class PruningParams:
    """Elimination strategy knobs; None disables the corresponding stage."""

    closest_count: int | None = 20
    survivors: int | None = 10

    def __post_init__(self):
        if self.closest_count is not None and self.closest_count < 1:
            raise ValueError("closest_count must be >= 1")
        if self.survivors is not None and self.survivors < 1:
            raise ValueError("survivors must be >= 1")


def batch_distance(speed: float, frame_window: int, fps: float) -> float:
    """Distance traversed during one batch of a two-camera stream: vF/(2 fps)."""
    if fps <= 0:
        raise ValueError("fps must be positive")
    if frame_window < 1:
        raise ValueError("frame_window must be >= 1")
    if speed < 0:
        raise ValueError("speed must be non-negative")
    return speed * frame_window / (2.0 * fps)


def batch_stream(poses, frame_window: int) -> list[PoseBatch]:
    """Split a time-sorted raw-pose stream into windows of F distinct frames.

    A trailing window shorter than F is emitted as-is so segment ends are
    not dropped.
    """
    if frame_window < 1:
        raise ValueError("frame_window must be >= 1")
    poses = list(poses)
    for earlier, later in zip(poses, poses[1:]):
        if later.timestamp < earlier.timestamp:
            raise OrderingError(
                f"raw poses not sorted by timestamp near t={later.timestamp}"
            )

    batches: list[PoseBatch] = []
    current: list[RawPose] = []
    frame_times: list[float] = []
    for pose in poses:
        is_new_frame = not frame_times or pose.timestamp != frame_times[-1]
        if is_new_frame and len(frame_times) == frame_window:
            batches.append(
                PoseBatch(frame_window, current, frame_times[0], frame_times[-1])
            )
            current, frame_times = [], []
        if is_new_frame:
            frame_times.append(pose.timestamp)
        current.append(pose)
    if current:
        batches.append(
            PoseBatch(frame_window, current, frame_times[0], frame_times[-1])
        )
    return batches


def select_closest(batch: PoseBatch, closest_count: int) -> PoseBatch:
    """Keep the C poses with the smallest camera-to-marker range.

    Input order is preserved among survivors; ties fall to the earlier pose.
    """
    if closest_count < 1:
        raise ValueError("closest_count must be >= 1")
    poses = batch.poses
    if len(poses) > closest_count:
        distances = np.array([p.marker_distance for p in poses])
        keep = sorted(np.argsort(distances, kind="stable")[:closest_count])
        poses = [poses[i] for i in keep]
    return PoseBatch(batch.frame_window, list(poses), batch.start_time, batch.end_time)


def consensus_point(poses) -> np.ndarray:
    """Component-wise mean of pose positions."""
    return np.array([p.position for p in poses]).mean(axis=0)


def eliminate_outliers(batch: PoseBatch, survivors: int) -> PoseBatch:
    """Greedy backward elimination against a recomputed consensus point.

    While more than U poses remain, drop the pose farthest from the mean
    position; at equal distance the later-timestamped pose goes first.
    """
    if survivors < 1:
        raise ValueError("survivors must be >= 1")
    poses = list(batch.poses)
    while len(poses) > survivors:
        positions = np.array([p.position for p in poses])
        consensus = positions.mean(axis=0)
        distances = np.linalg.norm(positions - consensus, axis=1)
        farthest = distances.max()
        worst = max(
            (i for i in range(len(poses)) if distances[i] == farthest),
            key=lambda i: (poses[i].timestamp, i),
        )
        poses.pop(worst)
    return PoseBatch(batch.frame_window, poses, batch.start_time, batch.end_time)


def prune_batch(batch: PoseBatch, params: PruningParams) -> PoseBatch:
    """Apply the enabled elimination stages in order: selection, then outliers."""
    if params.closest_count is not None:
        batch = select_closest(batch, params.closest_count)
    if params.survivors is not None:
        batch = eliminate_outliers(batch, params.survivors)
    return batch
