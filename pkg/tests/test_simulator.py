"""Simulator contracts: arithmetic, determinism, exact inversion, RSSI model."""

import numpy as np
import pytest

from markerloc import camera_pose, detect_cover_event
from markerloc.simulator import (
    NoiseModel,
    RssiModel,
    TrajectorySpec,
    default_marker_map,
    default_sensors,
    gen_observations,
    gen_rssi,
    gen_trajectory,
    rectangle_waypoints,
    visible_markers,
)


class TestGenTrajectory:
    def test_duration_and_sample_count(self):
        spec = TrajectorySpec([[0.0, 0.0, 2.0], [7.0, 0.0, 2.0]],
                              speed=0.35, fps=60.0)
        truth = gen_trajectory(spec)
        assert len(truth) == 2400  # 20 s at the interleaved 120 Hz rate
        assert truth[0].timestamp == 0.0
        assert truth[-1].timestamp == pytest.approx(20.0 - 1.0 / 120.0)

    def test_constant_speed(self):
        spec = TrajectorySpec([[0, 0], [5, 0]], speed=0.5, fps=30.0)
        truth = gen_trajectory(spec)
        steps = np.diff([p.position for p in truth], axis=0)
        np.testing.assert_allclose(np.linalg.norm(steps, axis=1),
                                   0.5 / 60.0, atol=1e-12)

    def test_fixed_heading_rotations_identical(self):
        spec = TrajectorySpec([[0, 0], [3, 4]], speed=1.0, fps=10.0)
        truth = gen_trajectory(spec)
        assert all(np.array_equal(p.rotation, np.zeros(3)) for p in truth)

    def test_along_path_heading(self):
        spec = TrajectorySpec([[0, 0], [0, 3]], speed=1.0, fps=10.0,
                              heading="along-path")
        truth = gen_trajectory(spec)
        np.testing.assert_allclose(truth[0].rotation, [0, 0, np.pi / 2],
                                   atol=1e-12)

    def test_bundle_height_fills_2d_waypoints(self):
        spec = TrajectorySpec([[0, 0], [1, 0]], speed=1.0, fps=10.0,
                              bundle_height=1.7)
        truth = gen_trajectory(spec)
        assert all(p.position[2] == 1.7 for p in truth)

    def test_rectangle_closes_loop(self):
        spec = TrajectorySpec(rectangle_waypoints(), speed=0.5, fps=30.0)
        truth = gen_trajectory(spec)
        step = spec.speed / (2.0 * spec.fps)
        gap = np.linalg.norm(truth[-1].position - truth[0].position)
        assert gap <= step + 1e-9

    def test_validations(self):
        with pytest.raises(ValueError):
            TrajectorySpec([[0, 0]], speed=1.0, fps=10.0)
        with pytest.raises(ValueError):
            TrajectorySpec([[0, 0], [1, 0]], speed=0.0, fps=10.0)
        with pytest.raises(ValueError):
            TrajectorySpec([[0, 0], [1, 0]], speed=1.0, fps=10.0,
                           heading="sideways")


class TestGenObservations:
    def test_zero_noise_roundtrip(self, clean_run):
        marker_map = clean_run.marker_map
        assert len(clean_run.observations) > 1000
        for obs in clean_run.observations[::37]:
            pose = camera_pose(obs, marker_map[obs.marker_id])
            truth = clean_run.truth[int(round(obs.timestamp * 120.0))]
            np.testing.assert_allclose(pose.position, truth.position,
                                       atol=1e-9)
            np.testing.assert_allclose(pose.rotation, truth.rotation,
                                       atol=1e-9)

    def test_cameras_alternate(self, clean_run):
        for obs in clean_run.observations[:500]:
            sample_index = int(round(obs.timestamp * 120.0))
            assert obs.camera_id == sample_index % 2

    def test_fixed_seed_bit_identical(self, clean_run):
        noise = NoiseModel(translation_sigma=0.05, rotation_sigma=0.03,
                           outlier_probability=0.2, seed=7)
        first = gen_observations(clean_run.truth[:200], clean_run.markers,
                                 noise=noise)
        second = gen_observations(clean_run.truth[:200], clean_run.markers,
                                  noise=noise)
        assert len(first) == len(second)
        for a, b in zip(first, second):
            assert a.timestamp == b.timestamp
            assert a.marker_id == b.marker_id
            assert np.array_equal(a.position, b.position)
            assert np.array_equal(a.rotation, b.rotation)

    def test_axis_inversion_outliers_are_gross(self, clean_run):
        noise = NoiseModel(outlier_probability=1.0,
                           outlier_mode="axis-inversion", seed=3)
        corrupted = gen_observations(clean_run.truth[:200], clean_run.markers,
                                     noise=noise)
        marker_map = clean_run.marker_map
        errors = []
        for obs in corrupted:
            pose = camera_pose(obs, marker_map[obs.marker_id])
            truth = clean_run.truth[int(round(obs.timestamp * 120.0))]
            errors.append(np.linalg.norm(pose.position - truth.position))
        assert np.median(errors) > 1.0  # far beyond any noise floor

    def test_visibility_reverses_with_trajectory(self, clean_run):
        markers = clean_run.markers
        forward = [
            {m.id for m in visible_markers(p, markers, 2.0, 8.0)}
            for p in clean_run.truth[:300]
        ]
        backward = [
            {m.id for m in visible_markers(p, markers, 2.0, 8.0)}
            for p in list(reversed(clean_run.truth[:300]))
        ]
        assert forward == backward[::-1]


class TestGenRssi:
    @staticmethod
    def _static_ish_truth():
        spec = TrajectorySpec([[2.0, 4.0], [3.0, 4.0]], speed=0.1, fps=30.0)
        return gen_trajectory(spec)

    def test_reference_power_at_one_meter(self):
        truth = self._static_ish_truth()
        sensor = ("00:11:22:33:44:00",
                  truth[0].position + np.array([0.0, 1.0, 0.0]))
        model = RssiModel(reference_power=-40.0, path_loss_exponent=2.0,
                          shadowing_sigma=0.0)
        samples = gen_rssi(truth, [sensor], model)
        assert samples[0].timestamp == truth[0].timestamp
        assert samples[0].rssi == pytest.approx(-40.0, abs=1e-9)

    def test_ten_meters_doubles_path_loss(self):
        truth = self._static_ish_truth()
        sensor = ("00:11:22:33:44:00",
                  truth[0].position + np.array([0.0, 10.0, 0.0]))
        model = RssiModel(reference_power=-40.0, path_loss_exponent=2.0,
                          shadowing_sigma=0.0)
        samples = gen_rssi(truth, [sensor], model)
        assert samples[0].rssi == pytest.approx(-60.0, abs=0.01)

    def test_cover_dip_detectable(self):
        spec = TrajectorySpec([[2.0, 4.0], [9.0, 4.0]], speed=0.35, fps=30.0)
        truth = gen_trajectory(spec)
        model = RssiModel(shadowing_sigma=2.0, cover_interval=(10.0, 13.0),
                          cover_attenuation=25.0, seed=11)
        samples = gen_rssi(truth, default_sensors(), model)
        event = detect_cover_event(samples)
        assert abs(event.release_time - 13.0) <= 0.5

    def test_deterministic(self):
        truth = self._static_ish_truth()
        model = RssiModel(shadowing_sigma=3.0, seed=5)
        first = gen_rssi(truth, default_sensors(), model)
        second = gen_rssi(truth, default_sensors(), model)
        assert [(s.timestamp, s.sensor, s.rssi) for s in first] \
            == [(s.timestamp, s.sensor, s.rssi) for s in second]

    def test_values_within_valid_range(self):
        truth = self._static_ish_truth()
        model = RssiModel(shadowing_sigma=6.0, seed=2)
        for s in gen_rssi(truth, default_sensors(), model):
            assert -120.0 <= s.rssi <= 0.0


class TestDefaults:
    def test_marker_ids_unique(self):
        markers = default_marker_map()
        ids = [m.id for m in markers]
        assert len(ids) == len(set(ids))
        assert len(markers) >= 16

    def test_marker_rotations_are_quarter_turns(self):
        for m in default_marker_map():
            remainder = np.mod(np.abs(m.rotation), np.pi / 2.0)
            wrapped = np.minimum(remainder, np.pi / 2.0 - remainder)
            assert np.all(wrapped < 1e-12)

    def test_sensor_macs_unique(self):
        macs = [mac for mac, _ in default_sensors()]
        assert len(macs) == len(set(macs))
