"""End-to-end wiring: detections to raw poses, likely poses, and the
smoothed trajectory."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import UnknownMarkerError
from .geometry import RawPose, camera_pose
from .pruning import PruningParams, batch_stream, prune_batch
from .smoothing import FilterParams, FinalPose, smooth_trajectory


@dataclass
class PipelineConfig:
    """Stage parameters; closest_count/survivors/q may be None to skip a stage."""

    frame_window: int = 15
    closest_count: int | None = 20
    survivors: int | None = 10
    q: float | None = 0.2
    r: float = 0.01

    def __post_init__(self):
        if self.frame_window < 1:
            raise ValueError("frame_window must be >= 1")


@dataclass
class PipelineResult:
    raw_poses: list[RawPose]
    likely_poses: list[RawPose]
    trajectory: list[FinalPose] = field(default_factory=list)


def raw_poses(observations, markers) -> list[RawPose]:
    """Resolve each detection against the marker map and recover its pose."""
    out = []
    for obs in observations:
        marker = markers.get(obs.marker_id)
        if marker is None:
            raise UnknownMarkerError(
                f"marker id {obs.marker_id} not present in the marker map"
            )
        out.append(camera_pose(obs, marker))
    return out


def run_pipeline(observations, markers, config: PipelineConfig) -> PipelineResult:
    """prune -> filter -> smooth, per the configured stages."""
    raw = raw_poses(observations, markers)
    params = PruningParams(config.closest_count, config.survivors)
    likely = [
        pose
        for batch in batch_stream(raw, config.frame_window)
        for pose in prune_batch(batch, params).poses
    ]
    result = PipelineResult(raw_poses=raw, likely_poses=likely)
    if config.q is not None:
        result.trajectory = smooth_trajectory(
            likely, FilterParams(q=config.q, r=config.r)
        )
    return result
