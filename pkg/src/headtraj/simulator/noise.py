"""Turn a ground-truth scene into the noisy per-frame quantities an estimator would output."""

from __future__ import annotations

import logging

import numpy as np

from headtraj.config import HeadingConfig, NoiseModel
from headtraj.geometry.so3 import body_angular_velocities, small_random_rotations
from headtraj.heading.decomposition import decompose_sequence, yaw_factor
from headtraj.trajectory.integration import differentiate_trajectory
from headtraj.types import Anchor, Observations, Scene

logger = logging.getLogger(__name__)

# one independent stream per channel, so enabling one noise source never
# changes the draws of another
_CHANNELS = ("rp", "ang_vel", "camera_v", "human_v", "hc")


def _streams(seed: int) -> dict[str, np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(len(_CHANNELS))
    return {name: np.random.Generator(np.random.PCG64(child)) for name, child in zip(_CHANNELS, children)}


def strip_yaw(M: np.ndarray, cfg: HeadingConfig | None = None) -> np.ndarray:
    """Roll-pitch part yaw(M)^T M of each rotation in an (N, 3, 3) stack."""
    return np.einsum("nji,njk->nik", yaw_factor(M, cfg), M)


def perturb(scene: Scene, noise: NoiseModel | None = None, cfg: HeadingConfig | None = None) -> Observations:
    """Observations of ``scene`` with the noise of ``noise`` (exact factors when every std is 0).

    Rotation noise is a small random rotation with uniform axis and
    Normal(0, std) angle: left-multiplied on roll-pitch (after which the yaw
    part is removed again), right-multiplied on body angular velocities and
    camera-space human orientations. Velocity noise is additive Gaussian
    per axis.
    """
    noise = noise or NoiseModel()
    rng = _streams(noise.seed)
    cam, human = scene.camera, scene.human
    T = scene.frames

    heading = decompose_sequence(cam.rotations, cfg)
    rp = heading.rp
    if noise.rp_noise_rad > 0:
        rp = strip_yaw(small_random_rotations(T, noise.rp_noise_rad, rng["rp"]) @ rp, cfg)

    dR = body_angular_velocities(cam.rotations)
    if noise.ang_vel_noise_rad > 0:
        dR = dR @ small_random_rotations(T - 1, noise.ang_vel_noise_rad, rng["ang_vel"])

    cam_v = differentiate_trajectory(cam.positions, cam.rotations)
    human_v = differentiate_trajectory(human.positions, human.rotations)
    if noise.vel_noise_mpf > 0:
        cam_v = cam_v + rng["camera_v"].normal(0.0, noise.vel_noise_mpf, cam_v.shape)
        human_v = human_v + rng["human_v"].normal(0.0, noise.vel_noise_mpf, human_v.shape)

    hc = np.einsum("tji,tjk->tik", cam.rotations, human.rotations)
    if noise.hc_noise_rad > 0:
        hc = hc @ small_random_rotations(T, noise.hc_noise_rad, rng["hc"])

    hc_t0 = cam.rotations[0].T @ (human.positions[0] - cam.positions[0])
    offsets = human.local_frame_joints() if human.joints is not None else None
    anchor = Anchor(yaw0=heading.yaw[0], camera_t0=cam.positions[0], human_t0=human.positions[0])
    logger.debug(
        "perturbed %d frames (rp=%g rad, vel=%g m/frame, ang_vel=%g rad, hc=%g rad, seed=%d)",
        T, noise.rp_noise_rad, noise.vel_noise_mpf, noise.ang_vel_noise_rad, noise.hc_noise_rad, noise.seed,
    )
    return Observations(
        fps=scene.fps,
        rp=rp,
        body_angular_velocity=dR,
        camera_local_velocity=cam_v,
        human_local_velocity=human_v,
        hc_rotations=hc,
        hc_translation0=hc_t0,
        joint_offsets=offsets,
        joint_names=human.joint_names,
        anchor=anchor,
    )
