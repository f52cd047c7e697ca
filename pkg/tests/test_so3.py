"""Tests for the rotation algebra."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from headtraj.exceptions import DegenerateInputError, InvalidRotationError, PreconditionError
from headtraj.geometry import (
    E_X,
    E_Y,
    E_Z,
    body_angular_velocity,
    body_to_world_velocity,
    from_axis_angle,
    geodesic_distance,
    is_rotation,
    orthonormalize,
    random_rotations,
    validate_rotation,
    validate_rotations,
    world_angular_velocity,
    yaw_angle,
    yaw_rotation,
)
from headtraj.geometry.so3 import batch_rot_x, batch_rot_z, batch_yaw_rotation

angles = st.floats(min_value=-np.pi, max_value=np.pi, allow_nan=False)


class TestFromAxisAngle:
    def test_zero_angle_is_identity(self):
        assert np.allclose(from_axis_angle(E_Y, 0.0), np.eye(3), atol=1e-15)

    def test_half_turn_about_gravity(self):
        assert np.allclose(from_axis_angle(E_Y, np.pi), np.diag([-1.0, 1.0, -1.0]), atol=1e-12)

    def test_right_handed(self):
        assert np.allclose(from_axis_angle(E_X, np.pi / 2) @ E_Y, E_Z, atol=1e-12)

    def test_non_unit_axis_rejected(self):
        with pytest.raises(PreconditionError):
            from_axis_angle(np.array([0.0, 2.0, 0.0]), 0.1)

    @given(theta=angles, phi=angles)
    @settings(max_examples=50, deadline=None)
    def test_same_axis_angles_add(self, theta, phi):
        axis = np.array([1.0, 2.0, -0.5])
        axis /= np.linalg.norm(axis)
        lhs = from_axis_angle(axis, theta) @ from_axis_angle(axis, phi)
        assert np.allclose(lhs, from_axis_angle(axis, theta + phi), atol=1e-10)


class TestValidation:
    def test_identity_is_rotation(self):
        assert is_rotation(np.eye(3))

    def test_reflection_is_not_rotation(self):
        assert not is_rotation(np.diag([1.0, 1.0, -1.0]))

    def test_wrong_shape_is_not_rotation(self):
        assert not is_rotation(np.eye(4))

    def test_nan_is_not_rotation(self):
        M = np.eye(3)
        M[0, 0] = np.nan
        assert not is_rotation(M)

    def test_validate_rotation_raises(self):
        with pytest.raises(InvalidRotationError):
            validate_rotation(2.0 * np.eye(3))

    def test_validate_rotations_names_bad_index(self, rng):
        stack = random_rotations(4, rng)
        stack[2] = np.diag([1.0, -1.0, -1.0]) * 1.01
        with pytest.raises(InvalidRotationError, match=r"\[2\]"):
            validate_rotations(stack)

    def test_validate_rotations_shape(self):
        with pytest.raises(PreconditionError):
            validate_rotations(np.eye(3))


class TestOrthonormalize:
    def test_identity(self):
        assert np.allclose(orthonormalize(np.eye(3)), np.eye(3), atol=1e-15)

    def test_idempotent_on_rotations(self, rotations):
        for R in rotations[:50]:
            assert np.abs(orthonormalize(R) - R).max() < 1e-12

    def test_repairs_small_perturbation(self, rotations, rng):
        for R in rotations[:50]:
            A = rng.normal(size=(3, 3))
            M = R + 1e-4 * (A + A.T)
            U = orthonormalize(M)
            assert np.abs(U.T @ U - np.eye(3)).max() < 1e-12
            assert np.linalg.det(U) == pytest.approx(1.0, abs=1e-12)
            assert geodesic_distance(U, R) < 1e-3

    def test_negative_determinant_rejected(self):
        with pytest.raises(DegenerateInputError):
            orthonormalize(np.diag([1.0, 1.0, -1.0]))

    def test_rank_deficient_rejected(self):
        with pytest.raises(DegenerateInputError):
            orthonormalize(np.diag([1.0, 1.0, 0.0]))


class TestGeodesicDistance:
    def test_zero_for_equal(self, rotations):
        assert geodesic_distance(rotations[0], rotations[0]) == pytest.approx(0.0, abs=1e-7)

    def test_reads_axis_angle(self):
        assert geodesic_distance(np.eye(3), from_axis_angle(E_Y, 0.3)) == pytest.approx(0.3, abs=1e-12)

    def test_opposite_quarter_turns(self):
        a, b = from_axis_angle(E_X, np.pi / 2), from_axis_angle(E_X, -np.pi / 2)
        assert geodesic_distance(a, b) == pytest.approx(np.pi, abs=1e-9)

    def test_symmetric_and_triangle(self, rotations):
        for i in range(0, 60, 3):
            A, B, C = rotations[i : i + 3]
            ab, bc, ac = geodesic_distance(A, B), geodesic_distance(B, C), geodesic_distance(A, C)
            assert ab == pytest.approx(geodesic_distance(B, A), abs=1e-9)
            assert ac <= ab + bc + 1e-9


class TestAngularVelocity:
    def test_no_motion(self, rotations):
        assert np.allclose(body_angular_velocity(rotations[0], rotations[0]), np.eye(3), atol=1e-12)

    def test_identity_start(self):
        R = from_axis_angle(E_Y, 0.1)
        assert np.allclose(body_angular_velocity(np.eye(3), R), R, atol=1e-15)

    def test_reconstruction_identity(self, rng):
        A, B = random_rotations(1000, rng), random_rotations(1000, rng)
        for R_t, R_next in zip(A, B):
            dRb = body_angular_velocity(R_t, R_next)
            assert np.abs(R_t @ dRb - R_next).max() < 1e-12

    def test_body_to_world_conjugation(self, rng):
        A, B = random_rotations(1000, rng), random_rotations(1000, rng)
        for R_t, R_next in zip(A, B):
            dRw = body_to_world_velocity(body_angular_velocity(R_t, R_next), R_t)
            assert np.abs(dRw - world_angular_velocity(R_t, R_next)).max() < 1e-12

    def test_zero_velocity_maps_to_identity(self, rotations):
        assert np.allclose(body_to_world_velocity(np.eye(3), rotations[3]), np.eye(3), atol=1e-12)

    def test_coincident_frames(self, rotations):
        assert np.allclose(body_to_world_velocity(rotations[4], np.eye(3)), rotations[4], atol=1e-15)


class TestYawHelpers:
    @given(theta=st.floats(min_value=-3.1, max_value=3.1, allow_nan=False))
    @settings(max_examples=50, deadline=None)
    def test_yaw_angle_inverts_yaw_rotation(self, theta):
        assert yaw_angle(yaw_rotation(theta)) == pytest.approx(theta, abs=1e-12)

    def test_positive_yaw_turns_forward_toward_x(self):
        assert np.allclose(yaw_rotation(np.pi / 2) @ E_Z, E_X, atol=1e-12)

    def test_batch_yaw_matches_scalar(self):
        thetas = np.linspace(-3.0, 3.0, 7)
        batch = batch_yaw_rotation(thetas)
        for theta, R in zip(thetas, batch):
            assert np.allclose(R, yaw_rotation(theta), atol=1e-12)

    def test_batch_axis_rotations(self):
        assert np.allclose(batch_rot_x(np.array([0.4]))[0], from_axis_angle(E_X, 0.4), atol=1e-12)
        assert np.allclose(batch_rot_z(np.array([-0.7]))[0], from_axis_angle(E_Z, -0.7), atol=1e-12)
