"""Tests for the yaw / roll-pitch decomposition and heading integration."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from headtraj.config import EPSILON_ENV, HeadingConfig
from headtraj.exceptions import ConfigError, InvalidRotationError, PreconditionError
from headtraj.geometry import E_X, E_Y, from_axis_angle, yaw_rotation
from headtraj.geometry.so3 import batch_rot_x
from headtraj.heading import (
    REPROJECT_INTERVAL,
    compose_world_orientation,
    decompose_heading,
    decompose_sequence,
    heading_angular_velocity,
    integrate_heading,
    integrate_heading_angles,
    yaw_factor,
    yaw_impurity,
)
from headtraj.selftest import sample_rotations, smooth_sequence


def _max_err(a, b):
    return float(np.abs(np.asarray(a) - np.asarray(b)).max())


class TestDecomposeHeading:
    def test_identity(self):
        d = decompose_heading(np.eye(3))
        assert np.allclose(d.yaw, np.eye(3), atol=1e-15)
        assert np.allclose(d.rp, np.eye(3), atol=1e-15)

    def test_pure_yaw_input(self):
        R = yaw_rotation(0.7)
        d = decompose_heading(R)
        assert _max_err(d.yaw, R) < 1e-12
        assert _max_err(d.rp, np.eye(3)) < 1e-12

    def test_looking_along_gravity_falls_back_to_x(self):
        R = from_axis_angle(E_X, np.pi / 2)
        assert np.allclose(R[:, 2], [0.0, -1.0, 0.0], atol=1e-12)
        d = decompose_heading(R)
        expected = np.column_stack([[0.0, 0.0, -1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]])
        assert _max_err(d.yaw, expected) < 1e-12
        assert np.linalg.det(d.yaw) == pytest.approx(1.0)
        assert _max_err(d.yaw @ d.rp, R) < 1e-12

    def test_round_trip(self, rng):
        rotations = sample_rotations(10_000, rng)
        yaw = yaw_factor(rotations)
        rp = np.einsum("nji,njk->nik", yaw, rotations)
        assert _max_err(yaw @ rp, rotations) < 1e-9
        assert _max_err(yaw @ E_Y, np.broadcast_to(E_Y, (len(rotations), 3))) < 1e-9
        assert _max_err(yaw_factor(rp), np.broadcast_to(np.eye(3), rp.shape)) < 1e-9

    def test_matches_vectorized_factor(self, rotations):
        for R in rotations[:20]:
            d = decompose_heading(R)
            assert _max_err(d.yaw, yaw_factor(R)) < 1e-15

    def test_invalid_rotation(self):
        with pytest.raises(InvalidRotationError):
            decompose_heading(np.ones((3, 3)))

    def test_epsilon_controls_fallback(self):
        R = from_axis_angle(E_X, np.deg2rad(70.0))  # |f_xz| = cos(70 deg) ~ 0.34
        assert _max_err(decompose_heading(R).yaw, np.eye(3)) < 1e-12
        wide = decompose_heading(R, HeadingConfig(epsilon=0.5))
        assert _max_err(wide.yaw[:, 2], E_X) < 1e-12


class TestHeadingConfig:
    def test_default(self, monkeypatch):
        monkeypatch.delenv(EPSILON_ENV, raising=False)
        assert HeadingConfig().epsilon == 1e-6

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv(EPSILON_ENV, "1e-4")
        assert HeadingConfig().epsilon == 1e-4

    def test_env_not_a_number(self, monkeypatch):
        monkeypatch.setenv(EPSILON_ENV, "tiny")
        with pytest.raises(ConfigError):
            HeadingConfig()

    def test_non_positive_rejected(self):
        with pytest.raises(ValidationError):
            HeadingConfig(epsilon=0.0)


class TestHeadingAngularVelocity:
    def test_static_camera(self):
        assert np.allclose(heading_angular_velocity(np.eye(3), np.eye(3), np.eye(3)), np.eye(3))

    def test_identity_conjugation(self, rotations):
        dR = rotations[0]
        assert _max_err(heading_angular_velocity(dR, np.eye(3), np.eye(3)), dR) < 1e-15

    def test_no_rotation_gives_identity(self, rotations):
        for R in rotations[:50]:
            rp = decompose_heading(R).rp
            assert _max_err(heading_angular_velocity(np.eye(3), rp, rp), np.eye(3)) < 1e-12

    def test_equals_yaw_increment(self, rng):
        for _ in range(100):
            track = smooth_sequence(120, rng)
            yaw = yaw_factor(track)
            rp = np.einsum("tji,tjk->tik", yaw, track)
            for t in range(len(track) - 1):
                dR = track[t].T @ track[t + 1]
                got = heading_angular_velocity(dR, rp[t], rp[t + 1])
                assert _max_err(got, yaw[t].T @ yaw[t + 1]) < 1e-9


class TestIntegrateHeading:
    def test_empty(self):
        out = integrate_heading(np.eye(3), [])
        assert out.shape == (1, 3, 3)
        assert np.allclose(out[0], np.eye(3))

    def test_angles_add(self):
        step = yaw_rotation(np.deg2rad(10.0))
        out = integrate_heading(np.eye(3), [step, step])
        assert _max_err(out[1], step) < 1e-12
        assert _max_err(out[2], yaw_rotation(np.deg2rad(20.0))) < 1e-12

    def test_first_entry_is_initial_yaw(self):
        yaw0 = yaw_rotation(-1.2)
        out = integrate_heading(yaw0, [yaw_rotation(0.1)] * 3)
        assert _max_err(out[0], yaw0) < 1e-15

    def test_rejects_off_axis_delta(self):
        with pytest.raises(PreconditionError, match=r"deltas\[1\]"):
            integrate_heading(np.eye(3), [yaw_rotation(0.1), from_axis_angle(E_X, 0.01)])

    def test_rejects_non_yaw_start(self):
        with pytest.raises(PreconditionError):
            integrate_heading(from_axis_angle(E_X, 0.3), [])

    def test_long_integration_matches_angle_sum(self, rng):
        angles = rng.normal(0.0, 0.05, size=5 * REPROJECT_INTERVAL)
        out = integrate_heading(np.eye(3), [yaw_rotation(a) for a in angles])
        expected = integrate_heading_angles(0.0, angles)
        for R, theta in zip(out, expected):
            assert _max_err(R, yaw_rotation(theta)) < 1e-9
        assert float(yaw_impurity(out).max()) < 1e-9

    def test_angle_integration_shape(self):
        out = integrate_heading_angles(np.array([0.5, -0.5]), np.ones((2, 4)))
        assert out.shape == (2, 5)
        assert np.allclose(out[0], [0.5, 1.5, 2.5, 3.5, 4.5])


class TestComposeWorldOrientation:
    def test_identity_camera(self, rotations):
        assert _max_err(compose_world_orientation(np.eye(3), np.eye(3), rotations[0]), rotations[0]) < 1e-15

    def test_aligned_human(self):
        Y = yaw_rotation(0.4)
        assert _max_err(compose_world_orientation(Y, np.eye(3), np.eye(3)), Y) < 1e-15

    def test_associative(self, rotations):
        Y = yaw_rotation(1.1)
        rp, hc = rotations[0], rotations[1]
        assert _max_err(compose_world_orientation(Y, rp, hc), (Y @ rp) @ hc) < 1e-12


class TestDecomposeSequence:
    def test_static_camera(self, rotations):
        seq = decompose_sequence(np.broadcast_to(rotations[0], (10, 3, 3)))
        assert _max_err(seq.dyaw, np.broadcast_to(np.eye(3), (9, 3, 3))) < 1e-12

    def test_yaw_only_motion(self):
        R = np.stack([yaw_rotation(0.05 * t) for t in range(40)])
        seq = decompose_sequence(R)
        assert _max_err(seq.rp, np.broadcast_to(np.eye(3), R.shape)) < 1e-12
        assert _max_err(seq.yaw, R) < 1e-9

    def test_reconstructs_smooth_track(self, camera_track):
        seq = decompose_sequence(camera_track)
        assert seq.rp.shape == camera_track.shape
        assert seq.dyaw.shape == (len(camera_track) - 1, 3, 3)
        assert _max_err(seq.yaw @ seq.rp, camera_track) < 1e-6

    def test_needs_two_frames(self):
        with pytest.raises(PreconditionError):
            decompose_sequence(np.eye(3)[None])

    @given(theta=st.floats(min_value=-np.pi, max_value=np.pi, allow_nan=False))
    @settings(max_examples=25, deadline=None)
    def test_invariant_to_initial_heading(self, theta):
        rng = np.random.Generator(np.random.PCG64(99))
        R = smooth_sequence(80, rng)
        G = yaw_rotation(theta)
        a, b = decompose_sequence(R), decompose_sequence(G @ R)
        assert _max_err(a.rp, b.rp) < 1e-9
        assert _max_err(a.dyaw, b.dyaw) < 1e-9
        assert _max_err(G @ a.yaw, b.yaw) < 1e-9

    def test_pitch_sweep_through_near_vertical(self):
        limit = np.pi / 2 - 1e-4
        R = batch_rot_x(np.concatenate([np.linspace(-limit, limit, 60), np.linspace(limit, -limit, 60)]))
        seq = decompose_sequence(R)
        for stack in (seq.rp, seq.yaw, seq.dyaw):
            assert np.all(np.isfinite(stack))
            gram = np.einsum("nji,njk->nik", stack, stack)
            assert _max_err(gram, np.broadcast_to(np.eye(3), gram.shape)) < 1e-6
