"""Trajectory quality metrics against predetermined paths, plus parameter sweeps.

Each estimated position is scored by its distance to the nearest path
segment. Over-smoothed trajectories look deceptively good on that metric, so
a drag penalty measures how far the estimate lags behind a segment's known
timed endpoint; penalized statistics add the accumulated drag on top of the
deviation statistics.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .geometry import as_vec3
from .pipeline import raw_poses
from .pruning import PruningParams, batch_stream, prune_batch
from .smoothing import FilterParams, smooth_trajectory
from .sync import interpolate_pose


@dataclass(eq=False)
class PathSegment:
    """A predetermined straight segment, optionally with traversal timing."""

    start: np.ndarray
    end: np.ndarray
    start_time: float | None = None
    end_time: float | None = None

    def __post_init__(self):
        self.start = as_vec3(self.start)
        self.end = as_vec3(self.end)
        if np.array_equal(self.start, self.end):
            raise ValueError("segment start and end coincide")
        if self.start_time is not None and self.end_time is not None:
            if self.end_time <= self.start_time:
                raise ValueError("segment end_time must exceed start_time")


@dataclass(frozen=True)
class SweepCell:
    """One grid point of the parameter sweep; None disables a stage."""

    closest_count: int | None
    survivors: int | None
    q: float | None
    r: float


@dataclass(eq=False)
class DeviationReport:
    """Per-point deviations and their summary statistics for one run."""

    distances: np.ndarray
    median: float
    mean: float
    drag_penalty: float = 0.0
    params: SweepCell | None = None

    @property
    def penalized_median(self) -> float:
        return self.median + self.drag_penalty

    @property
    def penalized_mean(self) -> float:
        return self.mean + self.drag_penalty


def point_segment_distance(p, seg: PathSegment, planar: bool = False) -> float:
    """Euclidean distance from a point to the closest point of a finite segment.

    With planar=True both the point and the segment are projected to the
    floor plane first.
    """
    p = as_vec3(p)
    a, b = seg.start, seg.end
    if planar:
        p, a, b = p[:2], a[:2], b[:2]
    ab = b - a
    denom = float(np.dot(ab, ab))
    if denom == 0.0:
        return float(np.linalg.norm(p - a))
    t = float(np.clip(np.dot(p - a, ab) / denom, 0.0, 1.0))
    return float(np.linalg.norm(p - (a + t * ab)))


def drag_penalty(trajectory, seg: PathSegment) -> float:
    """Distance between the segment's timed endpoint and the trajectory
    position interpolated at that time."""
    if seg.end_time is None:
        raise ValueError("segment carries no end_time")
    position, _ = interpolate_pose(trajectory, seg.end_time)
    return float(np.linalg.norm(position - seg.end))


def _clamped_drag(poses, seg: PathSegment) -> float:
    # pruning may trim the final partial batch, leaving the trajectory a few
    # frames short of the segment's timed end; evaluate at the nearest
    # spanned instant so cells stay comparable
    t = min(max(seg.end_time, poses[0].timestamp), poses[-1].timestamp)
    position, _ = interpolate_pose(poses, t)
    return float(np.linalg.norm(position - seg.end))


def deviation_report(
    trajectory,
    segments,
    planar: bool = False,
    include_drag: bool = False,
    params: SweepCell | None = None,
) -> DeviationReport:
    """Score every trajectory point against its nearest segment.

    With include_drag, the drag penalties of all timed segments are
    accumulated into the report's drag_penalty; the penalized_* statistics
    add that on top of the plain deviation statistics.
    """
    poses = list(trajectory)
    segments = list(segments)
    if not poses:
        raise ValueError("trajectory is empty")
    if not segments:
        raise ValueError("segment list is empty")
    distances = np.array([
        min(point_segment_distance(p.position, seg, planar=planar) for seg in segments)
        for p in poses
    ])
    drag = 0.0
    if include_drag:
        for seg in segments:
            if seg.end_time is not None:
                drag += _clamped_drag(poses, seg)
    return DeviationReport(
        distances=distances,
        median=float(np.median(distances)),
        mean=float(np.mean(distances)),
        drag_penalty=drag,
        params=params,
    )


@dataclass(eq=False)
class SweepDataset:
    """Everything a sweep cell needs: detections resolved against the marker
    map, the batching window, and the reference path."""

    observations: list
    markers: dict
    frame_window: int
    segments: list


def parameter_sweep(dataset: SweepDataset, grid: dict, planar: bool = False):
    """Run the pipeline over the cartesian product of parameter lists.

    grid maps 'closest_count', 'survivors', 'q', 'r' to value lists (None
    entries disable a stage; omitted keys get a single default). Reports come
    back in deterministic grid order, tagged with their cell. Cells without a
    filter (q=None) score the pruned raw poses directly and take no drag
    penalty.
    """
    axes = {
        "closest_count": list(grid.get("closest_count", [None])),
        "survivors": list(grid.get("survivors", [None])),
        "q": list(grid.get("q", [None])),
        "r": list(grid.get("r", [0.01])),
    }
    if any(len(v) == 0 for v in axes.values()):
        raise ValueError("sweep grid axes must be non-empty")

    raw = raw_poses(dataset.observations, dataset.markers)
    batches = batch_stream(raw, dataset.frame_window)
    timed = any(seg.end_time is not None for seg in dataset.segments)

    reports = []
    for c, u, q, r in product(axes["closest_count"], axes["survivors"],
                              axes["q"], axes["r"]):
        params = PruningParams(closest_count=c, survivors=u)
        likely = [p for batch in batches for p in prune_batch(batch, params).poses]
        if q is None:
            trajectory = likely
            include_drag = False
        else:
            trajectory = smooth_trajectory(likely, FilterParams(q=q, r=r))
            include_drag = timed
        reports.append(deviation_report(
            trajectory, dataset.segments, planar=planar,
            include_drag=include_drag, params=SweepCell(c, u, q, r),
        ))
    return reports
