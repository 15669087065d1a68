"""Synthetic ground truth: trajectories, noisy marker detections, RSSI streams.

Everything is generated from explicit seeds so runs are reproducible
bit-for-bit. Observations are the exact algebraic inverse of the camera-pose
recovery, optionally perturbed by Gaussian noise that grows with marker
range and by gross outliers that mimic inverted-axis misdetections. The RSSI
synthesis is a plain log-distance model: it is non-physical scaffolding
whose only contract is a detectable cover dip and plausible magnitudes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import MarkerObservation, MarkerSpec, rodrigues, rodrigues_inv
from .smoothing import FinalPose
from .sync import RssiSample

# Camera 0 looks along +x of the bundle frame, camera 1 along -x
# (back-to-back mount); both share the bundle origin.
_BORESIGHT = np.array([1.0, 0.0, 0.0])

_MIN_VISIBLE_RANGE = 0.2
_UNIFORM_JUMP_METERS = 3.0


@dataclass
class TrajectorySpec:
    """Constant-speed piecewise-linear motion through waypoints."""

    waypoints: list
    speed: float = 0.35
    fps: float = 60.0
    heading: str = "fixed"        # 'fixed' | 'along-path'
    bundle_height: float = 2.0

    def __post_init__(self):
        if len(self.waypoints) < 2:
            raise ValueError("need at least two waypoints")
        if self.speed <= 0:
            raise ValueError("speed must be positive")
        if self.fps <= 0:
            raise ValueError("fps must be positive")
        if self.heading not in ("fixed", "along-path"):
            raise ValueError(f"unknown heading policy {self.heading!r}")


@dataclass
class NoiseModel:
    """Detection noise: per-component sigmas plus a gross-outlier mode."""

    translation_sigma: float = 0.0   # meters, at zero range
    distance_growth: float = 0.0     # extra sigma per meter of range
    rotation_sigma: float = 0.0      # radians, per component
    outlier_probability: float = 0.0
    outlier_mode: str = "axis-inversion"  # 'axis-inversion' | 'uniform-jump'
    seed: int = 0

    def __post_init__(self):
        if min(self.translation_sigma, self.distance_growth,
               self.rotation_sigma) < 0:
            raise ValueError("noise sigmas must be non-negative")
        if not 0.0 <= self.outlier_probability <= 1.0:
            raise ValueError("outlier_probability must be in [0, 1]")
        if self.outlier_mode not in ("axis-inversion", "uniform-jump"):
            raise ValueError(f"unknown outlier mode {self.outlier_mode!r}")


# Calibrated so raw poses look like real detections: fluctuation around the
# true point growing with range, plus frequent gross inverted-axis errors.
# Yields raw-vs-pipeline deviation medians of roughly 0.14 m vs 0.024 m on
# the default straight run.
DEFAULT_NOISE = NoiseModel(
    translation_sigma=0.010,
    distance_growth=0.010,
    rotation_sigma=0.012,
    outlier_probability=0.30,
    outlier_mode="axis-inversion",
    seed=0,
)


@dataclass
class RssiModel:
    """Log-distance propagation with optional hand-cover attenuation."""

    reference_power: float = -60.0   # dBm at 1 m
    path_loss_exponent: float = 2.0
    shadowing_sigma: float = 3.0     # dB
    sample_rate: float = 2.0         # Hz per sensor
    cover_interval: tuple | None = None  # (t0, t1) seconds, truth clock
    cover_attenuation: float = 25.0  # dB
    seed: int = 0

    def __post_init__(self):
        if self.path_loss_exponent <= 0:
            raise ValueError("path_loss_exponent must be positive")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")


def _waypoint3(w, bundle_height: float) -> np.ndarray:
    a = np.asarray(w, dtype=float).ravel()
    if a.size == 2:
        return np.array([a[0], a[1], bundle_height])
    if a.size == 3:
        return a.copy()
    raise ValueError("waypoints must be 2-D or 3-D")


def gen_trajectory(spec: TrajectorySpec) -> list[FinalPose]:
    """Sample the true bundle pose at the interleaved two-camera rate 2*fps.

    Sampling covers [0, total_length/speed) half-open, so a path of length L
    yields round(L/speed * 2*fps) samples.
    """
    points = [_waypoint3(w, spec.bundle_height) for w in spec.waypoints]
    vectors = [b - a for a, b in zip(points, points[1:])]
    lengths = np.array([np.linalg.norm(v) for v in vectors])
    if np.any(lengths == 0):
        raise ValueError("consecutive waypoints must be distinct")
    cumulative = np.concatenate([[0.0], np.cumsum(lengths)])
    total = float(cumulative[-1])
    duration = total / spec.speed
    dt = 1.0 / (2.0 * spec.fps)
    count = int(round(duration / dt))

    out: list[FinalPose] = []
    for k in range(count):
        t = k * dt
        arc = min(spec.speed * t, total)
        i = min(int(np.searchsorted(cumulative, arc, side="right")) - 1,
                len(vectors) - 1)
        along = vectors[i] / lengths[i]
        position = points[i] + along * (arc - cumulative[i])
        if spec.heading == "fixed":
            rotation = np.zeros(3)
        else:
            rotation = np.array([0.0, 0.0, np.arctan2(along[1], along[0])])
        out.append(FinalPose(t, position, rotation))
    return out


def visible_markers(pose, markers, fov: float, max_range: float) -> list[MarkerSpec]:
    """Markers inside either camera's view cone at the given pose."""
    r_w_c = rodrigues(pose.rotation)
    bore = r_w_c @ _BORESIGHT
    cos_half = np.cos(fov / 2.0)
    seen = []
    for marker in markers:
        d = marker.position - pose.position
        dist = float(np.linalg.norm(d))
        if not _MIN_VISIBLE_RANGE <= dist <= max_range:
            continue
        if abs(float(np.dot(d, bore))) >= dist * cos_half:
            seen.append(marker)
    return seen


def gen_observations(
    truth,
    markers,
    fov: float = 2.0,
    max_range: float = 8.0,
    noise: NoiseModel | None = None,
) -> list[MarkerObservation]:
    """Detections for every visible marker along the true trajectory.

    Sample k belongs to camera k % 2. The exact observation inverts the
    camera-pose equations; noise and outliers are then applied on top.
    """
    noise = noise or NoiseModel()
    rng = np.random.default_rng(noise.seed)
    cos_half = np.cos(fov / 2.0)
    markers = list(markers)
    rotations = [rodrigues(m.rotation) for m in markers]

    out: list[MarkerObservation] = []
    for k, pose in enumerate(truth):
        camera = k % 2
        r_w_c = rodrigues(pose.rotation)
        bore = (r_w_c @ _BORESIGHT) * (1.0 if camera == 0 else -1.0)
        for marker, r_w_m in zip(markers, rotations):
            d = marker.position - pose.position
            dist = float(np.linalg.norm(d))
            if not _MIN_VISIBLE_RANGE <= dist <= max_range:
                continue
            if float(np.dot(d, bore)) < dist * cos_half:
                continue
            tvec = r_w_c.T @ d
            rvec = rodrigues_inv(r_w_c.T @ r_w_m)
            if noise.translation_sigma > 0 or noise.distance_growth > 0:
                sigma = noise.translation_sigma + noise.distance_growth * dist
                tvec = tvec + rng.normal(0.0, sigma, 3)
            if noise.rotation_sigma > 0:
                rvec = rvec + rng.normal(0.0, noise.rotation_sigma, 3)
            if noise.outlier_probability > 0 and rng.random() < noise.outlier_probability:
                if noise.outlier_mode == "axis-inversion":
                    rvec = -rvec
                else:
                    tvec = tvec + rng.uniform(
                        -_UNIFORM_JUMP_METERS, _UNIFORM_JUMP_METERS, 3
                    )
            out.append(MarkerObservation(pose.timestamp, camera, marker.id,
                                         tvec, rvec))
    return out


def gen_rssi(
    truth,
    sensors,
    model: RssiModel | None = None,
    transmitter: str = "BE:AC:00:00:00:01",
) -> list[RssiSample]:
    """Log-distance RSSI streams for stationary sensors hearing the beacon.

    sensors is a list of (mac, position) pairs. Per-sensor sample grids are
    staggered so the aggregate stream has a steady rate; the merged output is
    sorted by timestamp.
    """
    model = model or RssiModel()
    rng = np.random.default_rng(model.seed)
    times = np.array([p.timestamp for p in truth])
    positions = np.array([p.position for p in truth])
    t0, t_end = float(times[0]), float(times[-1])
    period = 1.0 / model.sample_rate

    out: list[RssiSample] = []
    for i, (mac, sensor_pos) in enumerate(sensors):
        sensor_pos = np.asarray(sensor_pos, dtype=float).reshape(3)
        phase = (i / max(len(sensors), 1)) * period
        count = int(np.floor((t_end - t0 - phase) / period)) + 1
        for k in range(max(count, 0)):
            t = t0 + phase + k * period
            beacon = np.array([
                np.interp(t, times, positions[:, axis]) for axis in range(3)
            ])
            dist = max(float(np.linalg.norm(beacon - sensor_pos)), 0.1)
            rssi = model.reference_power \
                - 10.0 * model.path_loss_exponent * np.log10(dist)
            if model.shadowing_sigma > 0:
                rssi += rng.normal(0.0, model.shadowing_sigma)
            if model.cover_interval is not None:
                c0, c1 = model.cover_interval
                if c0 <= t <= c1:
                    rssi -= model.cover_attenuation
            rssi = float(np.clip(rssi, -120.0, 0.0))
            out.append(RssiSample(t, transmitter, mac, rssi))
    out.sort(key=lambda s: s.timestamp)
    return out


def default_marker_map(
    width: float = 12.0,
    depth: float = 8.0,
    spacing: float = 2.0,
    height: float = 2.0,
    edge_length: float = 0.3,
) -> list[MarkerSpec]:
    """Markers along the four walls of a rectangular room, facing inward.

    Wall rotations are quarter-turn rotation vectors, matching the surveyed
    convention of easily measured marker orientations.
    """
    markers: list[MarkerSpec] = []
    half_pi = np.pi / 2.0
    next_id = 0

    def add(position, rotation):
        nonlocal next_id
        markers.append(MarkerSpec(next_id, position, rotation, edge_length))
        next_id += 1

    for x in np.arange(spacing / 2.0, width, spacing):
        add([x, 0.0, height], [-half_pi, 0.0, 0.0])     # wall y=0 faces +y
        add([x, depth, height], [half_pi, 0.0, 0.0])    # wall y=depth faces -y
    for y in np.arange(spacing / 2.0, depth, spacing):
        add([0.0, y, height], [0.0, half_pi, 0.0])      # wall x=0 faces +x
        add([width, y, height], [0.0, -half_pi, 0.0])   # wall x=width faces -x
    return markers


def default_sensors(
    width: float = 12.0,
    depth: float = 8.0,
    height: float = 1.5,
    count: int = 8,
) -> list[tuple[str, np.ndarray]]:
    """Sensors spread along the room perimeter at a fixed height."""
    perimeter = 2.0 * (width + depth)
    sensors = []
    for i in range(count):
        arc = (i + 0.5) / count * perimeter
        if arc < width:
            pos = [arc, 0.0, height]
        elif arc < width + depth:
            pos = [width, arc - width, height]
        elif arc < 2 * width + depth:
            pos = [2 * width + depth - arc, depth, height]
        else:
            pos = [0.0, perimeter - arc, height]
        sensors.append((f"00:11:22:33:44:{i:02X}", np.array(pos)))
    return sensors


def straight_waypoints(width: float = 12.0, depth: float = 8.0) -> list:
    return [[0.5, depth / 2.0], [width - 4.5, depth / 2.0]]


def rectangle_waypoints(width: float = 12.0, depth: float = 8.0) -> list:
    return [[2.0, 2.0], [width - 2.0, 2.0], [width - 2.0, depth - 2.0],
            [2.0, depth - 2.0], [2.0, 2.0]]


def zigzag_waypoints(width: float = 12.0, depth: float = 8.0) -> list:
    return [[1.0, 2.0], [4.0, depth - 2.0], [7.0, 2.0], [width - 2.0, depth - 2.0]]
