"""Marker-based ground-truth trajectories for annotating indoor RSSI recordings.

The pipeline turns fiducial-marker detections into raw camera-bundle poses,
prunes them by close-marker selection and consensus outlier elimination,
smooths the survivors with an identity-dynamics Kalman filter, and labels
timestamped RSSI samples with interpolated poses on a common clock. A seeded
simulator provides end-to-end ground truth and the evaluation module scores
trajectories against predetermined paths.
"""

from .errors import (
    CoverDetectionError,
    ExtrapolationError,
    InvalidRotationError,
    MarkerlocError,
    OrderingError,
    ParseError,
    UnknownMarkerError,
)
from .evaluation import (
    DeviationReport,
    PathSegment,
    SweepCell,
    SweepDataset,
    deviation_report,
    drag_penalty,
    parameter_sweep,
    point_segment_distance,
)
from .geometry import (
    MarkerObservation,
    MarkerSpec,
    RawPose,
    camera_pose,
    compose_rotations,
    rodrigues,
    rodrigues_inv,
    transform_vector,
)
from .pipeline import PipelineConfig, PipelineResult, run_pipeline
from .pruning import (
    PoseBatch,
    PruningParams,
    batch_distance,
    batch_stream,
    eliminate_outliers,
    select_closest,
)
from .smoothing import (
    FilterParams,
    FinalPose,
    PoseState,
    kalman_step,
    smooth_trajectory,
)
from .sync import (
    AnnotatedSample,
    AnnotationResult,
    CoverEvent,
    RssiSample,
    align_clocks,
    annotate,
    detect_cover_event,
    interpolate_pose,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotatedSample",
    "AnnotationResult",
    "CoverDetectionError",
    "CoverEvent",
    "DeviationReport",
    "ExtrapolationError",
    "FilterParams",
    "FinalPose",
    "InvalidRotationError",
    "MarkerObservation",
    "MarkerSpec",
    "MarkerlocError",
    "OrderingError",
    "ParseError",
    "PathSegment",
    "PipelineConfig",
    "PipelineResult",
    "PoseBatch",
    "PoseState",
    "PruningParams",
    "RawPose",
    "RssiSample",
    "SweepCell",
    "SweepDataset",
    "UnknownMarkerError",
    "align_clocks",
    "annotate",
    "batch_distance",
    "batch_stream",
    "camera_pose",
    "compose_rotations",
    "deviation_report",
    "detect_cover_event",
    "drag_penalty",
    "eliminate_outliers",
    "interpolate_pose",
    "kalman_step",
    "parameter_sweep",
    "point_segment_distance",
    "rodrigues",
    "rodrigues_inv",
    "run_pipeline",
    "select_closest",
    "smooth_trajectory",
    "transform_vector",
]
