"""Tests for the synthetic scene generator and the observation noise model."""
import numpy as np
import pytest
from pydantic import ValidationError

from headtraj.config import GaitConfig, NoiseModel, PathConfig, RigConfig, SceneConfig, preset_names
from headtraj.exceptions import ConfigError, DegenerateInputError
from headtraj.heading import decompose_sequence, yaw_factor
from headtraj.metrics import evaluate_scenes
from headtraj.simulator import generate_scene, look_at, path_center, perturb, root_path, stance_mask
from headtraj.trajectory import integrate_trajectory, reconstruct_from_observations
from headtraj.types import Scene


def _arrays(seq):
    return [a for a in (seq.rotations, seq.positions, seq.local_velocities, seq.joints, seq.contacts) if a is not None]


class TestSceneConfig:
    def test_preset_names(self):
        names = preset_names()
        assert len(names) == 16
        assert "figure-eight-handheld" in names

    def test_preset_split_on_last_dash(self):
        cfg = SceneConfig.from_preset("figure-eight-orbit", frames=30)
        assert cfg.path.kind == "figure-eight"
        assert cfg.rig.kind == "orbit"
        assert cfg.frames == 30

    @pytest.mark.parametrize("name", ["spiral-orbit", "circle-drone", "circle"])
    def test_unknown_preset(self, name):
        with pytest.raises(ConfigError, match="unknown preset"):
            SceneConfig.from_preset(name)

    def test_small_circle_rejected(self):
        with pytest.raises(ValidationError):
            SceneConfig(path=PathConfig(radius=0.2))

    def test_cadence_too_fast(self):
        with pytest.raises(ValidationError):
            SceneConfig(fps=2.0)

    def test_rig_must_enclose_path(self):
        with pytest.raises(ValidationError):
            SceneConfig(path=PathConfig(radius=8.0), rig=RigConfig(kind="orbit"))

    def test_root_speed(self):
        assert SceneConfig().root_speed == pytest.approx(0.7 * 1.8)
        assert SceneConfig(path=PathConfig(speed=2.0)).root_speed == 2.0
        assert SceneConfig.from_preset("stationary-orbit").root_speed == 0.0


class TestGenerateScene:
    def test_deterministic(self):
        cfg = SceneConfig.from_preset("figure-eight-handheld", frames=50)
        a, b = generate_scene(cfg, seed=5), generate_scene(cfg, seed=5)
        for x, y in zip(_arrays(a.camera) + _arrays(a.human), _arrays(b.camera) + _arrays(b.human)):
            assert np.array_equal(x, y)

    def test_handheld_seed_only_moves_camera(self):
        cfg = SceneConfig.from_preset("circle-handheld", frames=50)
        a, b = generate_scene(cfg, seed=1), generate_scene(cfg, seed=2)
        assert np.array_equal(a.human.positions, b.human.positions)
        assert np.array_equal(a.camera.positions, b.camera.positions)
        assert not np.allclose(a.camera.rotations, b.camera.rotations)

    def test_root_height(self, circle_scene):
        assert np.all(circle_scene.human.positions[:, 1] == -0.9)

    def test_circle_radius(self, circle_scene):
        cfg = SceneConfig.from_preset("circle-orbit", frames=60)
        offset = circle_scene.human.positions - path_center(cfg)
        assert np.allclose(np.linalg.norm(offset[:, [0, 2]], axis=1), cfg.path.radius, atol=1e-12)

    def test_line_path(self):
        cfg = SceneConfig.from_preset("line-static", frames=40)
        t = np.arange(40) / cfg.fps
        pos, heading = root_path(cfg, t)
        assert np.allclose(pos[:, 2], cfg.root_speed * t)
        assert np.all(pos[:, 0] == 0.0)
        assert np.all(heading == 0.0)

    def test_human_faces_direction_of_travel(self, follow_scene):
        v = follow_scene.human.local_velocities
        # body-frame motion is straight ahead
        assert np.all(np.abs(v[:, 0]) < 0.05 * v[:, 2])
        assert np.all(v[:, 2] > 0)

    def test_static_camera(self):
        scene = generate_scene(SceneConfig.from_preset("circle-static", frames=30))
        assert np.allclose(scene.camera.local_velocities, 0.0)
        assert np.allclose(scene.camera.rotations, scene.camera.rotations[0])

    def test_camera_looks_at_root(self, circle_scene):
        to_root = circle_scene.human.positions - circle_scene.camera.positions
        to_root /= np.linalg.norm(to_root, axis=1, keepdims=True)
        assert np.allclose(circle_scene.camera.rotations[:, :, 2], to_root, atol=1e-12)

    @pytest.mark.parametrize("path", ["line", "circle", "figure-eight", "stationary"])
    def test_follow_rig_keeps_human_in_view(self, path):
        scene = generate_scene(SceneConfig.from_preset(f"{path}-follow", frames=90), seed=2)
        forward = scene.camera.rotations[:, :, 2]
        to_root = scene.human.positions - scene.camera.positions
        angle = np.arctan2(np.linalg.norm(np.cross(forward, to_root), axis=1), np.sum(forward * to_root, axis=1))
        assert angle.max() < 0.2

    @pytest.mark.parametrize("name", preset_names())
    def test_positions_integrate_from_local_velocities(self, name):
        scene = generate_scene(SceneConfig.from_preset(name, frames=60), seed=4)
        for seq in (scene.human, scene.camera):
            track = integrate_trajectory(seq.positions[0], seq.rotations, seq.local_velocities)
            assert np.abs(track - seq.positions).max() < 1e-9

    def test_too_slow_to_swing(self):
        cfg = SceneConfig(frames=60, path=PathConfig(kind="line", speed=0.05), rig=RigConfig(kind="follow"))
        with pytest.raises(ConfigError, match="contact threshold"):
            generate_scene(cfg)

    def test_custom_gait(self):
        cfg = SceneConfig(frames=40, gait=GaitConfig(root_height=1.1))
        assert np.all(generate_scene(cfg).human.positions[:, 1] == -1.1)


class TestGait:
    def test_stance_schedule(self):
        cfg = SceneConfig.from_preset("circle-orbit", frames=120)
        n = cfg.step_frames
        mask = stance_mask(cfg)
        assert n == 17
        assert mask[:n, 0].all() and not mask[:n, 1].any()
        assert mask[n : 2 * n, 1].all() and not mask[n : 2 * n, 0].any()
        assert np.all(mask.sum(axis=1) == 1)

    def test_planted_feet_do_not_move(self, circle_scene):
        cfg = SceneConfig.from_preset("circle-orbit", frames=60)
        stance = stance_mask(cfg)
        feet = circle_scene.human.foot_positions()
        steady = stance[:-1] & stance[1:]
        step = np.linalg.norm(np.diff(feet, axis=0), axis=-1)
        assert np.all(step[steady] == 0.0)
        assert np.all(feet[..., 1][stance] == 0.0)

    def test_labels_recover_stance(self, circle_scene):
        stance = stance_mask(SceneConfig.from_preset("circle-orbit", frames=60))
        expected = np.concatenate([stance[:-1] & stance[1:], (stance[-2] & stance[-1])[None]])
        assert np.array_equal(circle_scene.human.contacts, expected)

    def test_swing_lifts_foot(self, circle_scene):
        feet = circle_scene.human.foot_positions()
        assert feet[..., 1].min() < -0.05
        assert feet[..., 1].max() == 0.0

    def test_stationary(self):
        cfg = SceneConfig.from_preset("stationary-orbit", frames=40)
        scene = generate_scene(cfg)
        assert stance_mask(cfg).all()
        assert scene.human.contacts.all()
        assert np.all(scene.human.foot_positions()[..., 1] == 0.0)
        assert np.allclose(scene.human.positions, scene.human.positions[0])


class TestLookAt:
    def test_axes(self):
        R = look_at(np.array([[0.0, 0.0, -5.0]]), np.array([[0.0, 0.0, 0.0]]))
        assert np.allclose(R[0], np.eye(3), atol=1e-15)

    def test_proper_rotation(self, rng):
        eye = rng.normal(size=(20, 3)) * 5.0
        R = look_at(eye, np.zeros((20, 3)))
        assert np.allclose(np.linalg.det(R), 1.0)
        assert np.allclose(np.einsum("nji,njk->nik", R, R), np.eye(3), atol=1e-12)
        # image "down" never points up
        assert np.all(R[:, 1, 1] >= 0.0)

    def test_looking_along_gravity(self):
        with pytest.raises(DegenerateInputError):
            look_at(np.zeros((1, 3)), np.array([[0.0, 5.0, 0.0]]))


class TestPerturb:
    def test_noiseless_factors_are_exact(self, circle_scene, circle_obs):
        cam, human = circle_scene.camera, circle_scene.human
        heading = decompose_sequence(cam.rotations)
        assert np.array_equal(circle_obs.rp, heading.rp)
        assert np.array_equal(circle_obs.camera_local_velocity, cam.local_velocities)
        assert np.array_equal(circle_obs.human_local_velocity, human.local_velocities)
        assert np.allclose(cam.rotations @ circle_obs.hc_rotations, human.rotations, atol=1e-12)
        assert np.array_equal(circle_obs.anchor.yaw0, heading.yaw[0])
        assert np.array_equal(circle_obs.anchor.human_t0, human.positions[0])
        assert circle_obs.joint_names == human.joint_names

    def test_deterministic(self, circle_scene):
        noise = NoiseModel(rp_noise_rad=0.01, vel_noise_mpf=0.001, seed=11)
        a, b = perturb(circle_scene, noise), perturb(circle_scene, noise)
        assert np.array_equal(a.rp, b.rp)
        assert np.array_equal(a.human_local_velocity, b.human_local_velocity)

    def test_seed_changes_draws(self, circle_scene):
        a = perturb(circle_scene, NoiseModel(rp_noise_rad=0.01, seed=1))
        b = perturb(circle_scene, NoiseModel(rp_noise_rad=0.01, seed=2))
        assert not np.allclose(a.rp, b.rp)

    def test_channels_are_independent(self, circle_scene):
        only_rp = perturb(circle_scene, NoiseModel(rp_noise_rad=0.01, seed=4))
        both = perturb(circle_scene, NoiseModel(rp_noise_rad=0.01, vel_noise_mpf=0.001, seed=4))
        assert np.array_equal(only_rp.rp, both.rp)
        assert np.array_equal(only_rp.camera_local_velocity, circle_scene.camera.local_velocities)
        assert not np.array_equal(both.camera_local_velocity, circle_scene.camera.local_velocities)

    def test_noisy_rp_stays_heading_free(self, circle_scene):
        obs = perturb(circle_scene, NoiseModel(rp_noise_rad=0.05, seed=9))
        assert np.abs(yaw_factor(obs.rp) - np.eye(3)).max() < 1e-9

    def test_velocity_noise_scale(self, circle_scene):
        obs = perturb(circle_scene, NoiseModel(vel_noise_mpf=0.01, seed=3))
        residual = obs.human_local_velocity - circle_scene.human.local_velocities
        assert np.std(residual) == pytest.approx(0.01, rel=0.3)

    def test_rotation_noise_magnitude(self, circle_scene, circle_obs):
        obs = perturb(circle_scene, NoiseModel(hc_noise_rad=0.02, seed=5))
        delta = np.einsum("tji,tjk->tik", circle_obs.hc_rotations, obs.hc_rotations)
        angles = np.arccos(np.clip((np.trace(delta, axis1=1, axis2=2) - 1) / 2, -1, 1))
        assert 0.0 < angles.mean() < 0.1

    def test_rp_noise_alone_causes_drift(self, circle_scene):
        obs = perturb(circle_scene, NoiseModel(rp_noise_rad=0.01, seed=11))
        human, camera = reconstruct_from_observations(obs)
        report = evaluate_scenes(Scene(camera=camera, human=human), circle_scene).report
        assert np.isfinite(report.rte)
        assert report.rte > 0.0
