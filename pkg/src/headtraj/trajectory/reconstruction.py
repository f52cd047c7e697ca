"""Joint world-space reconstruction of camera and human motion.

Inputs are what a per-frame estimator provides: the camera roll-pitch
factor, the camera body-frame angular velocity (from extrinsics), the
camera-space human orientation, and local velocities of both bodies. The
camera heading is integrated from the heading angular velocities, then

    R_cam = R_yaw R_rp
    R_human = R_yaw R_rp R_hc

and both position tracks are dead-reckoned from their own local velocities.
The initial heading defaults to identity; everything downstream is
equivariant to that choice.
"""

from __future__ import annotations

import logging

import numpy as np

from headtraj.config import HeadingConfig
from headtraj.exceptions import PreconditionError
from headtraj.heading.decomposition import heading_angular_velocities, integrate_heading, project_to_yaw
from headtraj.trajectory.integration import integrate_trajectory
from headtraj.types import MotionSequence, Observations

logger = logging.getLogger(__name__)


def reconstruct_world_motion(
    cam_ang_vel: np.ndarray,
    cam_local_v: np.ndarray,
    rp_seq: np.ndarray,
    R_hc_seq: np.ndarray,
    human_local_v: np.ndarray,
    t0_h: np.ndarray | None = None,
    t0_cam: np.ndarray | None = None,
    *,
    yaw0: np.ndarray | None = None,
    joint_offsets: np.ndarray | None = None,
    joint_names: tuple[str, ...] = (),
    fps: float = 30.0,
    cfg: HeadingConfig | None = None,
) -> tuple[MotionSequence, MotionSequence]:
    """Rebuild (human, camera) world motion.

    Args:
        cam_ang_vel: (T-1, 3, 3) camera body-frame angular velocities R_t^T R_{t+1}.
        cam_local_v: (T-1, 3) camera local velocities, m/frame.
        rp_seq: (T, 3, 3) camera roll-pitch factors.
        R_hc_seq: (T, 3, 3) human orientation in the camera frame.
        human_local_v: (T-1, 3) human root local velocities, m/frame.
        t0_h, t0_cam: start positions (default origin).
        yaw0: initial camera heading (default identity).
        joint_offsets: optional (T, J, 3) joints in the human root frame.

    Returns:
        (human, camera) MotionSequences.
    """
    rp_seq = np.asarray(rp_seq, dtype=np.float64)
    R_hc_seq = np.asarray(R_hc_seq, dtype=np.float64)
    cam_ang_vel = np.asarray(cam_ang_vel, dtype=np.float64).reshape(-1, 3, 3)
    cam_local_v = np.asarray(cam_local_v, dtype=np.float64).reshape(-1, 3)
    human_local_v = np.asarray(human_local_v, dtype=np.float64).reshape(-1, 3)
    T = len(rp_seq)
    lengths = {
        "R_hc_seq": (len(R_hc_seq), T),
        "cam_ang_vel": (len(cam_ang_vel), T - 1),
        "cam_local_v": (len(cam_local_v), T - 1),
        "human_local_v": (len(human_local_v), T - 1),
    }
    bad = [f"{k} ({got} != {want})" for k, (got, want) in lengths.items() if got != want]
    if bad:
        raise PreconditionError(f"length mismatch: {', '.join(bad)}")
    if T < 2:
        raise PreconditionError("reconstruction needs at least 2 frames")

    # Estimated factors make each increment only approximately a pure heading.
    dyaw = project_to_yaw(heading_angular_velocities(cam_ang_vel, rp_seq), cfg)
    yaw_seq = integrate_heading(np.eye(3) if yaw0 is None else yaw0, dyaw, cfg)

    cam_rots = np.einsum("tij,tjk->tik", yaw_seq, rp_seq)
    human_rots = np.einsum("tij,tjk->tik", cam_rots, R_hc_seq)

    t0_cam = np.zeros(3) if t0_cam is None else np.asarray(t0_cam, dtype=np.float64)
    t0_h = np.zeros(3) if t0_h is None else np.asarray(t0_h, dtype=np.float64)
    cam_pos = integrate_trajectory(t0_cam, cam_rots, cam_local_v)
    human_pos = integrate_trajectory(t0_h, human_rots, human_local_v)

    joints = None
    if joint_offsets is not None:
        offsets = np.asarray(joint_offsets, dtype=np.float64)
        joints = human_pos[:, None, :] + np.einsum("tij,tnj->tni", human_rots, offsets)

    human = MotionSequence(
        fps=fps,
        rotations=human_rots,
        positions=human_pos,
        local_velocities=human_local_v,
        joints=joints,
        joint_names=joint_names if joints is not None else (),
    )
    camera = MotionSequence(fps=fps, rotations=cam_rots, positions=cam_pos, local_velocities=cam_local_v)
    logger.debug("reconstructed %d frames", T)
    return human, camera


def reconstruct_from_observations(
    obs: Observations,
    *,
    identity_initial_yaw: bool = False,
    cfg: HeadingConfig | None = None,
) -> tuple[MotionSequence, MotionSequence]:
    """Reconstruct from an Observations bundle.

    With an anchor (and ``identity_initial_yaw`` unset) frame 0 is placed at
    its ground-truth heading and positions; otherwise the camera starts at
    the origin with identity heading and the human is placed from the
    camera-space translation of frame 0.
    """
    if obs.anchor is not None and not identity_initial_yaw:
        yaw0, t0_cam, t0_h = obs.anchor.yaw0, obs.anchor.camera_t0, obs.anchor.human_t0
    else:
        yaw0, t0_cam = np.eye(3), np.zeros(3)
        # frame-0 camera orientation is yaw0 @ rp[0] = rp[0]
        t0_h = obs.rp[0] @ obs.hc_translation0
    return reconstruct_world_motion(
        obs.body_angular_velocity,
        obs.camera_local_velocity,
        obs.rp,
        obs.hc_rotations,
        obs.human_local_velocity,
        t0_h,
        t0_cam,
        yaw0=yaw0,
        joint_offsets=obs.joint_offsets,
        joint_names=obs.joint_names,
        fps=obs.fps,
        cfg=cfg,
    )
