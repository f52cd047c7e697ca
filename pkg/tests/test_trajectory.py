"""Tests for dead-reckoning integration, reconstruction and the motion containers."""
import numpy as np
import pytest

from headtraj.config import NoiseModel
from headtraj.exceptions import InvalidRotationError, PreconditionError
from headtraj.geometry import random_rotations, yaw_rotation
from headtraj.heading import yaw_factor
from headtraj.simulator import perturb
from headtraj.trajectory import (
    differentiate_trajectory,
    integrate_trajectory,
    reconstruct_from_observations,
    reconstruct_world_motion,
)
from headtraj.types import Anchor, MotionSequence, Observations

I3 = np.eye(3)


def _eyes(n):
    return np.broadcast_to(I3, (n, 3, 3))


class TestIntegrateTrajectory:
    def test_zero_velocity(self):
        out = integrate_trajectory(np.zeros(3), _eyes(3), np.zeros((2, 3)))
        assert np.array_equal(out, np.zeros((3, 3)))

    def test_straight_line(self):
        out = integrate_trajectory(np.zeros(3), _eyes(3), [[0, 0, 1], [0, 0, 1]])
        assert np.allclose(out, [[0, 0, 0], [0, 0, 1], [0, 0, 2]])

    def test_turning_headings(self):
        R = np.stack([I3, yaw_rotation(np.pi / 2), yaw_rotation(np.pi)])
        v = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 1.0]])
        out = integrate_trajectory(np.zeros(3), R, v)
        # frame 0 steps along +Z, frame 1 (turned a quarter) steps along +X
        assert np.allclose(out, [[0, 0, 0], [0, 0, 1], [1, 0, 1]], atol=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(PreconditionError):
            integrate_trajectory(np.zeros(3), _eyes(3), np.zeros((3, 3)))

    def test_batched(self, rng):
        R = random_rotations(4 * 10, rng).reshape(4, 10, 3, 3)
        v = rng.normal(size=(4, 9, 3))
        t0 = rng.normal(size=(4, 3))
        batched = integrate_trajectory(t0, R, v)
        for b in range(4):
            assert np.allclose(batched[b], integrate_trajectory(t0[b], R[b], v[b]), atol=1e-12)

    def test_world_rotation_equivariance(self, rng):
        R = random_rotations(30, rng)
        v = rng.normal(0.0, 0.1, size=(29, 3))
        t0 = rng.normal(size=3)
        G = random_rotations(1, rng)[0]
        base = integrate_trajectory(t0, R, v)
        rotated = integrate_trajectory(G @ t0, G @ R, v)
        assert np.abs(rotated - base @ G.T).max() < 1e-12


class TestDifferentiateTrajectory:
    def test_static_body(self, rng):
        R = random_rotations(5, rng)
        v = differentiate_trajectory(np.ones((5, 3)), R)
        assert np.array_equal(v, np.zeros((4, 3)))

    def test_identity_frame(self):
        v = differentiate_trajectory([[0, 0, 0], [0, 0, 2]], _eyes(2))
        assert np.allclose(v, [[0, 0, 2]])

    def test_inverse_pair(self, rng):
        R = random_rotations(1000, rng)
        p = rng.normal(size=(1000, 3))
        v = differentiate_trajectory(p, R)
        assert np.abs(integrate_trajectory(p[0], R, v) - p).max() < 1e-9
        w = rng.normal(size=(999, 3))
        assert np.abs(differentiate_trajectory(integrate_trajectory(p[0], R, w), R) - w).max() < 1e-9

    def test_length_mismatch(self):
        with pytest.raises(PreconditionError):
            differentiate_trajectory(np.zeros((4, 3)), _eyes(3))

    def test_needs_two_frames(self):
        with pytest.raises(PreconditionError):
            differentiate_trajectory(np.zeros((1, 3)), _eyes(1))


class TestReconstructWorldMotion:
    def test_static(self):
        t0 = np.array([1.0, -1.0, 2.0])
        human, camera = reconstruct_world_motion(
            _eyes(4), np.zeros((4, 3)), _eyes(5), _eyes(5), np.zeros((4, 3)), t0, t0
        )
        assert np.allclose(human.positions, t0)
        assert np.allclose(camera.positions, t0)
        assert np.allclose(camera.rotations, I3)

    def test_co_located_human_follows_camera(self, circle_obs):
        obs = circle_obs
        human, camera = reconstruct_world_motion(
            obs.body_angular_velocity, obs.camera_local_velocity, obs.rp, _eyes(obs.frames), obs.camera_local_velocity
        )
        assert np.abs(human.positions - camera.positions).max() < 1e-12
        assert np.abs(human.rotations - camera.rotations).max() < 1e-12

    def test_length_mismatch(self):
        with pytest.raises(PreconditionError, match="cam_local_v"):
            reconstruct_world_motion(_eyes(4), np.zeros((3, 3)), _eyes(5), _eyes(5), np.zeros((4, 3)))

    def test_initial_heading_is_a_global_yaw(self, circle_obs):
        obs = circle_obs
        G = yaw_rotation(0.9)
        args = (obs.body_angular_velocity, obs.camera_local_velocity, obs.rp, obs.hc_rotations, obs.human_local_velocity)
        h_a, c_a = reconstruct_world_motion(*args)
        h_b, c_b = reconstruct_world_motion(*args, yaw0=G)
        assert np.abs(h_b.positions - h_a.positions @ G.T).max() < 1e-9
        assert np.abs(c_b.positions - c_a.positions @ G.T).max() < 1e-9
        assert np.abs(h_b.rotations - G @ h_a.rotations).max() < 1e-9


class TestReconstructFromObservations:
    def test_anchored_round_trip(self, circle_scene, circle_obs):
        human, camera = reconstruct_from_observations(circle_obs)
        assert np.abs(camera.rotations - circle_scene.camera.rotations).max() < 1e-6
        assert np.abs(camera.positions - circle_scene.camera.positions).max() < 1e-6
        assert np.abs(human.rotations - circle_scene.human.rotations).max() < 1e-6
        assert np.abs(human.positions - circle_scene.human.positions).max() < 1e-6
        assert np.abs(human.joints - circle_scene.human.joints).max() < 1e-6
        assert human.joint_names == circle_scene.human.joint_names

    def test_identity_initial_yaw(self, follow_scene):
        obs = perturb(follow_scene, NoiseModel())
        human, camera = reconstruct_from_observations(obs, identity_initial_yaw=True)
        assert np.allclose(camera.positions[0], 0.0)
        G = yaw_factor(follow_scene.camera.rotations[0])
        offset = follow_scene.camera.positions[0]
        assert np.abs(camera.positions @ G.T + offset - follow_scene.camera.positions).max() < 1e-6
        assert np.abs(human.positions @ G.T + offset - follow_scene.human.positions).max() < 1e-6

    def test_without_anchor_matches_identity_initial_yaw(self, circle_obs):
        a, _ = reconstruct_from_observations(circle_obs.replace(anchor=None))
        b, _ = reconstruct_from_observations(circle_obs, identity_initial_yaw=True)
        assert np.array_equal(a.positions, b.positions)


class TestMotionSequence:
    def test_arrays_are_read_only(self):
        seq = MotionSequence(fps=30.0, rotations=_eyes(3), positions=np.zeros((3, 3)))
        with pytest.raises(ValueError):
            seq.positions[0, 0] = 1.0

    def test_input_is_copied(self):
        p = np.zeros((3, 3))
        seq = MotionSequence(fps=30.0, rotations=_eyes(3), positions=p)
        p[0, 0] = 5.0
        assert seq.positions[0, 0] == 0.0

    def test_rejects_length_mismatch(self):
        with pytest.raises(PreconditionError):
            MotionSequence(fps=30.0, rotations=_eyes(3), positions=np.zeros((2, 3)))

    def test_rejects_velocity_count(self):
        with pytest.raises(PreconditionError):
            MotionSequence(fps=30.0, rotations=_eyes(3), positions=np.zeros((3, 3)), local_velocities=np.zeros((3, 3)))

    @pytest.mark.parametrize("fps", [0.0, -30.0, float("inf"), float("nan")])
    def test_rejects_bad_fps(self, fps):
        with pytest.raises(PreconditionError):
            MotionSequence(fps=fps, rotations=_eyes(2), positions=np.zeros((2, 3)))

    def test_rejects_invalid_rotation(self):
        R = np.array(_eyes(2))
        R[1] *= 2.0
        with pytest.raises(InvalidRotationError):
            MotionSequence(fps=30.0, rotations=R, positions=np.zeros((2, 3)))

    def test_default_joint_names(self):
        seq = MotionSequence(fps=30.0, rotations=_eyes(2), positions=np.zeros((2, 3)), joints=np.zeros((2, 3, 3)))
        assert seq.joint_names == ("root", "left_foot", "right_foot")
        assert seq.foot_indices == [1, 2]
        assert seq.foot_positions().shape == (2, 2, 3)

    def test_contacts_must_match_feet(self):
        with pytest.raises(PreconditionError):
            MotionSequence(
                fps=30.0, rotations=_eyes(2), positions=np.zeros((2, 3)),
                joints=np.zeros((2, 3, 3)), contacts=np.ones((2, 3), dtype=bool),
            )

    def test_local_frame_joints(self):
        R = np.stack([yaw_rotation(np.pi / 2)] * 2)
        joints = np.array([[[1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [1.0, 0.0, 1.0]]] * 2)
        seq = MotionSequence(fps=30.0, rotations=R, positions=joints[:, 0], joints=joints)
        local = seq.local_frame_joints()
        assert np.allclose(local[0, 0], 0.0)
        # +X in the world is the forward axis of a body turned a quarter toward +X
        assert np.allclose(local[0, 1], [0.0, 0.0, 1.0], atol=1e-12)

    def test_foot_positions_need_joints(self):
        seq = MotionSequence(fps=30.0, rotations=_eyes(2), positions=np.zeros((2, 3)))
        with pytest.raises(PreconditionError):
            seq.foot_positions()


class TestObservations:
    def test_inconsistent_lengths(self, circle_obs):
        with pytest.raises(PreconditionError, match="human_local_velocity"):
            circle_obs.replace(human_local_velocity=np.zeros((3, 3)))

    def test_needs_two_frames(self):
        with pytest.raises(PreconditionError):
            Observations(
                fps=30.0, rp=_eyes(1), body_angular_velocity=np.zeros((0, 3, 3)),
                camera_local_velocity=np.zeros((0, 3)), human_local_velocity=np.zeros((0, 3)),
                hc_rotations=_eyes(1),
            )

    def test_anchor_validates_heading(self):
        with pytest.raises(InvalidRotationError):
            Anchor(yaw0=np.zeros((3, 3)), camera_t0=np.zeros(3), human_t0=np.zeros(3))
