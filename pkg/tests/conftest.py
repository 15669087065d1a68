"""Shared fixtures: the default simulated room and runs reused across modules."""

from dataclasses import dataclass

import numpy as np
import pytest

from markerloc.evaluation import PathSegment
from markerloc.simulator import (
    DEFAULT_NOISE,
    NoiseModel,
    TrajectorySpec,
    default_marker_map,
    gen_observations,
    gen_trajectory,
    straight_waypoints,
)


@dataclass
class SimRun:
    truth: list
    markers: list
    marker_map: dict
    observations: list
    segments: list
    frame_window: int


def make_run(noise: NoiseModel, speed=0.35, fps=60.0, frame_window=15) -> SimRun:
    spec = TrajectorySpec(waypoints=straight_waypoints(), speed=speed, fps=fps)
    truth = gen_trajectory(spec)
    markers = default_marker_map()
    observations = gen_observations(truth, markers, noise=noise)
    segments = [PathSegment(
        truth[0].position, truth[-1].position,
        truth[0].timestamp, truth[-1].timestamp,
    )]
    return SimRun(
        truth=truth,
        markers=markers,
        marker_map={m.id: m for m in markers},
        observations=observations,
        segments=segments,
        frame_window=frame_window,
    )


@pytest.fixture(scope="session")
def clean_run() -> SimRun:
    """Noise-free 20 s straight run: the exactness oracle."""
    return make_run(NoiseModel(seed=0))


@pytest.fixture(scope="session")
def noisy_run() -> SimRun:
    """Straight run under the calibrated default noise model."""
    return make_run(DEFAULT_NOISE, speed=0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
