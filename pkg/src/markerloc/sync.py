"""Clock alignment via the hand-cover RSSI dip, and pose annotation of RSSI samples.

Covering the camera-beacon bundle suppresses strong RSSI readings; the
trailing edge of that dip, visible in both the video and the RSSI stream,
pins the constant offset between the two clocks. Poses are then linearly
interpolated at (offset-corrected) RSSI timestamps.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import CoverDetectionError, ExtrapolationError
from .geometry import rodrigues

log = logging.getLogger(__name__)

STRONG_BAND_DBM = (-85.0, -65.0)
DETECTION_WINDOW_S = 1.0
DIP_FRACTION = 0.25      # window count below this fraction of baseline opens a dip
RECOVERY_FRACTION = 0.6  # window count above this fraction of baseline closes it


@dataclass(eq=False)
class RssiSample:
    """One received-signal-strength reading."""

    timestamp: float
    transmitter: str
    sensor: str
    rssi: float

    def __post_init__(self):
        self.timestamp = float(self.timestamp)
        self.rssi = float(self.rssi)
        if not -120.0 <= self.rssi <= 0.0:
            raise ValueError(f"rssi {self.rssi} outside [-120, 0] dBm")


@dataclass(eq=False)
class AnnotatedSample:
    """An RSSI sample labeled with its ground-truth pose."""

    timestamp: float
    transmitter: str
    sensor: str
    rssi: float
    position: np.ndarray
    rotation_matrix: np.ndarray


@dataclass
class CoverEvent:
    """The detected hand-cover disturbance; release_time is the sync anchor."""

    release_time: float
    cover_time: float
    confidence: float


@dataclass
class AnnotationResult:
    samples: list[AnnotatedSample]
    dropped: int


def detect_cover_event(
    samples,
    strong_band=STRONG_BAND_DBM,
    window: float = DETECTION_WINDOW_S,
    dip_fraction: float = DIP_FRACTION,
    recovery_fraction: float = RECOVERY_FRACTION,
) -> CoverEvent:
    """Locate the first sustained dip in strong-band sample counts.

    Counts of samples inside strong_band are windowed; a window falling below
    dip_fraction of the running pre-dip baseline opens the dip, and the
    release time is the first strong sample after which a full window carries
    at least recovery_fraction of the baseline again. Samples weaker than
    strong_band[0] never influence the result.
    """
    low, high = strong_band
    strong = np.sort(
        np.array([s.timestamp for s in samples if low <= s.rssi <= high], dtype=float)
    )
    if strong.size == 0:
        raise CoverDetectionError("stream contains no strong-band samples")
    t0, t_end = float(strong[0]), float(strong[-1])
    if t_end - t0 < 2.0 * window:
        raise ValueError("need at least two windows of strong-band data")

    n_bins = int(np.ceil((t_end - t0) / window))
    counts, _ = np.histogram(strong, bins=n_bins, range=(t0, t0 + n_bins * window))

    dip_bin = None
    baseline = 0.0
    for k in range(1, n_bins):
        baseline = float(np.mean(counts[:k]))
        if baseline < 1.0:
            continue
        if counts[k] < dip_fraction * baseline:
            dip_bin = k
            break
    if dip_bin is None:
        raise CoverDetectionError("no strong-band count dip found")

    recovery_bin = None
    min_count = counts[dip_bin]
    for k in range(dip_bin + 1, n_bins):
        min_count = min(min_count, counts[k])
        if counts[k] >= recovery_fraction * baseline:
            recovery_bin = k
            break
    if recovery_bin is None:
        raise CoverDetectionError("strong-band count dip never recovers")

    release_time = _first_sustained_resumption(
        strong, t0 + dip_bin * window, t0 + (recovery_bin + 1) * window,
        window, recovery_fraction * baseline,
    )
    if release_time is None:
        release_time = t0 + recovery_bin * window
    cover_time = _last_sustained_traffic(
        strong, release_time, window, recovery_fraction * baseline
    )
    if cover_time is None or cover_time >= release_time:
        cover_time = min(t0 + dip_bin * window, release_time - window)

    confidence = float(np.clip(1.0 - min_count / baseline, 0.0, 1.0))
    return CoverEvent(release_time=release_time, cover_time=cover_time,
                      confidence=confidence)


def _first_sustained_resumption(strong, t_from, t_to, window, needed):
    """First strong timestamp whose forward window holds >= needed samples."""
    lo = np.searchsorted(strong, t_from, side="left")
    hi = np.searchsorted(strong, t_to, side="right")
    for idx in range(lo, hi):
        tau = strong[idx]
        ahead = np.searchsorted(strong, tau + window, side="left") - idx
        if ahead >= needed:
            return float(tau)
    return None


def _last_sustained_traffic(strong, before, window, needed):
    """Last strong timestamp before `before` whose trailing window is busy."""
    hi = np.searchsorted(strong, before, side="left")
    for idx in range(hi - 1, -1, -1):
        tau = strong[idx]
        behind = idx - np.searchsorted(strong, tau - window, side="right") + 1
        if behind >= needed:
            return float(tau)
    return None


def align_clocks(video_release: float, rssi_release: float) -> float:
    """Constant offset that maps video timestamps onto the RSSI clock."""
    return float(rssi_release) - float(video_release)


def interpolate_pose(trajectory, t: float):
    """Pose at time t: position linearly interpolated, rotation from the
    nearer bracketing pose, returned as (position, rotation matrix)."""
    poses = trajectory if isinstance(trajectory, list) else list(trajectory)
    if not poses:
        raise ValueError("trajectory is empty")
    times = np.array([p.timestamp for p in poses])
    if t < times[0] or t > times[-1]:
        raise ExtrapolationError(
            f"t={t} outside trajectory span [{times[0]}, {times[-1]}]"
        )
    if len(poses) == 1:
        only = poses[0]
        return only.position.copy(), rodrigues(only.rotation)
    i = int(np.searchsorted(times, t, side="right")) - 1
    i = min(max(i, 0), len(poses) - 2)
    left, right = poses[i], poses[i + 1]
    span = right.timestamp - left.timestamp
    w = (t - left.timestamp) / span
    position = (1.0 - w) * left.position + w * right.position
    nearer = left if (t - left.timestamp) <= (right.timestamp - t) else right
    return position, rodrigues(nearer.rotation)


def annotate(rssi, trajectory, offset: float = 0.0) -> AnnotationResult:
    """Label RSSI samples with interpolated poses on a common clock.

    offset is the video-to-RSSI clock shift from align_clocks; samples whose
    corrected time falls outside the trajectory span are dropped and counted.
    """
    poses = list(trajectory)
    if not poses:
        raise ValueError("trajectory is empty")
    out: list[AnnotatedSample] = []
    dropped = 0
    for sample in rssi:
        t_video = sample.timestamp - offset
        try:
            position, rotation_matrix = interpolate_pose(poses, t_video)
        except ExtrapolationError:
            dropped += 1
            continue
        out.append(AnnotatedSample(
            timestamp=sample.timestamp,
            transmitter=sample.transmitter,
            sensor=sample.sensor,
            rssi=sample.rssi,
            position=position,
            rotation_matrix=rotation_matrix,
        ))
    if dropped:
        log.info("annotate: dropped %d of %d samples outside trajectory span",
                 dropped, dropped + len(out))
    return AnnotationResult(samples=out, dropped=dropped)
