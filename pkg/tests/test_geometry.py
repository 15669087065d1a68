"""Rotation algebra against an independent oracle (scipy Rotation plus
explicit homogeneous transforms)."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from markerloc import (
    InvalidRotationError,
    MarkerObservation,
    MarkerSpec,
    UnknownMarkerError,
    camera_pose,
    compose_rotations,
    rodrigues,
    rodrigues_inv,
    transform_vector,
)


def random_rotvec(rng, max_angle=np.pi - 1e-6):
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    return axis * rng.uniform(0.0, max_angle)


def homogeneous(rotvec, tvec):
    t = np.eye(4)
    t[:3, :3] = Rotation.from_rotvec(rotvec).as_matrix()
    t[:3, 3] = tvec
    return t


def oracle_camera_pose(marker, obs):
    """Extract the camera pose from T_w_m (T_c_m)^-1."""
    t_w_m = homogeneous(marker.rotation, marker.position)
    t_c_m = homogeneous(obs.rotation, obs.position)
    t_w_c = t_w_m @ np.linalg.inv(t_c_m)
    return t_w_c[:3, 3], Rotation.from_matrix(t_w_c[:3, :3]).as_rotvec()


class TestRodrigues:
    def test_zero_vector_gives_identity(self):
        assert np.array_equal(rodrigues([0.0, 0.0, 0.0]), np.eye(3))

    def test_quarter_turn_about_x(self):
        expected = np.array([[1, 0, 0], [0, 0, -1], [0, 1, 0]], dtype=float)
        np.testing.assert_allclose(rodrigues([np.pi / 2, 0, 0]), expected,
                                   atol=1e-12)

    def test_matches_scipy_on_random_vectors(self, rng):
        for _ in range(300):
            r = random_rotvec(rng, max_angle=np.pi + 1.0)
            np.testing.assert_allclose(
                rodrigues(r), Rotation.from_rotvec(r).as_matrix(), atol=1e-12
            )

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            rodrigues([np.nan, 0.0, 0.0])


class TestRodriguesInv:
    def test_identity_gives_zero(self):
        assert np.array_equal(rodrigues_inv(np.eye(3)), np.zeros(3))

    def test_half_turn_about_x(self):
        r = rodrigues_inv(np.diag([1.0, -1.0, -1.0]))
        np.testing.assert_allclose(r, [np.pi, 0.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(rodrigues(r), np.diag([1.0, -1.0, -1.0]),
                                   atol=1e-9)

    def test_half_turn_sign_convention(self, rng):
        # the canonical representative has a positive first nonzero component
        for _ in range(50):
            axis = rng.normal(size=3)
            axis /= np.linalg.norm(axis)
            r = rodrigues_inv(rodrigues(axis * np.pi))
            first_nonzero = r[np.abs(r) > 1e-9][0]
            assert first_nonzero > 0
            np.testing.assert_allclose(rodrigues(r), rodrigues(axis * np.pi),
                                       atol=1e-9)

    def test_matches_scipy_on_random_matrices(self, rng):
        for _ in range(300):
            m = Rotation.from_rotvec(random_rotvec(rng)).as_matrix()
            np.testing.assert_allclose(
                rodrigues_inv(m), Rotation.from_matrix(m).as_rotvec(), atol=1e-9
            )

    def test_roundtrip_spec_example(self):
        r = np.array([0.3, -0.2, 0.9])
        np.testing.assert_allclose(rodrigues_inv(rodrigues(r)), r, atol=1e-9)

    def test_rejects_non_orthonormal(self):
        with pytest.raises(InvalidRotationError):
            rodrigues_inv(np.eye(3) + 1e-6)

    def test_rejects_reflection(self):
        with pytest.raises(InvalidRotationError):
            rodrigues_inv(np.diag([1.0, 1.0, -1.0]))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1.0, 1.0), min_size=3, max_size=3),
       st.floats(0.0, np.pi - 1e-6))
def test_roundtrip_property(direction, angle):
    d = np.array(direction)
    norm = np.linalg.norm(d)
    r = d / norm * angle if norm > 1e-3 else np.zeros(3)
    np.testing.assert_allclose(rodrigues_inv(rodrigues(r)), r, atol=1e-9)


def test_matrix_roundtrip(rng):
    for _ in range(300):
        m = rodrigues(random_rotvec(rng))
        np.testing.assert_allclose(rodrigues(rodrigues_inv(m)), m, atol=1e-9)


class TestTransformVector:
    def test_identity(self):
        np.testing.assert_array_equal(
            transform_vector(np.eye(3), [1.0, 2.0, 3.0]), [1.0, 2.0, 3.0]
        )

    def test_quarter_turn_about_z(self):
        got = transform_vector(rodrigues([0, 0, np.pi / 2]), [1.0, 0.0, 0.0])
        np.testing.assert_allclose(got, [0.0, 1.0, 0.0], atol=1e-12)

    def test_norm_preservation(self, rng):
        for _ in range(200):
            m = rodrigues(random_rotvec(rng))
            v = rng.normal(size=3) * 10
            assert abs(np.linalg.norm(m @ v) - np.linalg.norm(v)) < 1e-9


class TestComposeRotations:
    def test_identity_left(self, rng):
        m = rodrigues(random_rotvec(rng))
        np.testing.assert_array_equal(compose_rotations(np.eye(3), m), m)

    def test_inverse_composition(self, rng):
        m = rodrigues(random_rotvec(rng))
        np.testing.assert_allclose(compose_rotations(m, m.T), np.eye(3),
                                   atol=1e-9)

    def test_associativity(self, rng):
        for _ in range(100):
            a, b, c = (rodrigues(random_rotvec(rng)) for _ in range(3))
            left = compose_rotations(compose_rotations(a, b), c)
            right = compose_rotations(a, compose_rotations(b, c))
            np.testing.assert_allclose(left, right, atol=1e-9)


class TestCameraPose:
    def test_marker_at_origin(self):
        marker = MarkerSpec(1, [0, 0, 0], [0, 0, 0])
        obs = MarkerObservation(0.5, 0, 1, [0, 0, 2], [0, 0, 0])
        pose = camera_pose(obs, marker)
        np.testing.assert_allclose(pose.position, [0, 0, -2], atol=1e-12)
        np.testing.assert_allclose(pose.rotation, [0, 0, 0], atol=1e-12)
        assert pose.timestamp == 0.5
        assert pose.marker_distance == 2.0
        assert pose.source_marker == 1

    def test_translation_offset_only(self):
        marker = MarkerSpec(7, [2, 0, 1], [0, 0, 0])
        obs = MarkerObservation(1.0, 1, 7, [0, 0, 2], [0, 0, 0])
        pose = camera_pose(obs, marker)
        np.testing.assert_allclose(pose.position, [2, 0, -1], atol=1e-12)

    def test_zero_rotation_collapse(self, rng):
        # with both rotations zero the position is a plain subtraction
        for _ in range(50):
            marker_pos = rng.normal(size=3) * 5
            obs_pos = rng.normal(size=3) * 3
            marker = MarkerSpec(2, marker_pos, [0, 0, 0])
            obs = MarkerObservation(0.0, 0, 2, obs_pos, [0, 0, 0])
            np.testing.assert_allclose(
                camera_pose(obs, marker).position, marker_pos - obs_pos,
                atol=1e-12,
            )

    def test_matches_homogeneous_oracle(self, rng):
        for _ in range(1000):
            marker = MarkerSpec(3, rng.normal(size=3) * 10, random_rotvec(rng))
            obs = MarkerObservation(0.0, 0, 3, rng.normal(size=3) * 5,
                                    random_rotvec(rng))
            pose = camera_pose(obs, marker)
            want_pos, want_rot = oracle_camera_pose(marker, obs)
            np.testing.assert_allclose(pose.position, want_pos, atol=1e-9)
            np.testing.assert_allclose(pose.rotation, want_rot, atol=1e-9)

    def test_unknown_marker_rejected(self):
        marker = MarkerSpec(1, [0, 0, 0], [0, 0, 0])
        obs = MarkerObservation(0.0, 0, 2, [0, 0, 2], [0, 0, 0])
        with pytest.raises(UnknownMarkerError):
            camera_pose(obs, marker)
