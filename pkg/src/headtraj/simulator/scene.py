"""Deterministic synthetic scenes: a walking three-joint human and a camera rig.

The human root moves along a closed-form path at constant height and faces
its direction of travel. Feet alternate stance and swing, one step
(``SceneConfig.step_frames``) each, offset by one step between the feet:

    stance   foot planted at the root's mid-stance pose, shifted sideways
    swing    straight line between consecutive plants, lifted by
             -lift_height * sin(pi * u)

Planted feet have exactly zero velocity, so velocity-thresholded contact
labels recover the stance schedule.

Cameras look at the human root (``static`` looks at its first position and
never moves). The only random quantity is the phase of the handheld
shake, drawn from ``Generator(PCG64(seed))``.

Usage:
    cfg = SceneConfig.from_preset("circle-orbit", frames=120)
    scene = generate_scene(cfg, seed=7)
"""

from __future__ import annotations

import logging

import numpy as np
from scipy.spatial.transform import Rotation

from headtraj.config import SceneConfig
from headtraj.exceptions import ConfigError, DegenerateInputError
from headtraj.geometry.so3 import E_Y, batch_yaw_rotation
from headtraj.losses.contact import CONTACT_SPEED_MPS, generate_contact_labels
from headtraj.trajectory.integration import differentiate_trajectory
from headtraj.types import DEFAULT_JOINT_NAMES, MotionSequence, Scene

logger = logging.getLogger(__name__)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def root_path(cfg: SceneConfig, times: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Root positions (N, 3) and headings (N,) at ``times`` seconds (any real values)."""
    t = np.asarray(times, dtype=np.float64)
    s, r = cfg.root_speed, cfg.path.radius
    x = np.zeros_like(t)
    z = np.zeros_like(t)
    heading = np.zeros_like(t)
    kind = cfg.path.kind
    if kind == "line":
        z = s * t
    elif kind == "circle":
        theta = s * t / r
        x, z, heading = r * (1.0 - np.cos(theta)), r * np.sin(theta), theta
    elif kind == "figure-eight":
        phi = s * t / r
        x, z = 0.5 * r * np.sin(2 * phi), r * np.sin(phi)
        heading = np.arctan2(np.cos(2 * phi), np.cos(phi))
    y = np.full_like(t, -cfg.gait.root_height)
    return np.stack([x, y, z], axis=-1), heading


def path_center(cfg: SceneConfig) -> np.ndarray:
    """Ground point the orbit and static rigs are placed around."""
    if cfg.path.kind == "circle":
        return np.array([cfg.path.radius, 0.0, 0.0])
    if cfg.path.kind == "line":
        return np.array([0.0, 0.0, 0.5 * cfg.root_speed * (cfg.frames - 1) / cfg.fps])
    return np.zeros(3)


def stance_mask(cfg: SceneConfig) -> np.ndarray:
    """(T, 2) True where the foot is in stance (left, right)."""
    n = cfg.step_frames
    k = np.arange(cfg.frames)[:, None]
    offsets = np.array([0, n])[None, :]
    if cfg.path.kind == "stationary":
        return np.ones((cfg.frames, 2), dtype=bool)
    return (k - offsets) % (2 * n) < n


def _foot_tracks(cfg: SceneConfig) -> np.ndarray:
    n = cfg.step_frames
    k = np.arange(cfg.frames)
    w = cfg.gait.foot_width
    lift = 0.0 if cfg.path.kind == "stationary" else cfg.gait.lift_height
    feet = []
    for offset, lateral in ((0, -w), (n, w)):  # left, right; +X is the root's right
        local = (k - offset) % (2 * n)
        stance_start = k - local

        def plant(start: np.ndarray) -> np.ndarray:
            mid = (start + n // 2) / cfg.fps
            pos, heading = root_path(cfg, mid)
            side = batch_yaw_rotation(heading) @ np.array([lateral, 0.0, 0.0])
            out = pos + side
            out[:, 1] = 0.0
            return out

        prev, nxt = plant(stance_start), plant(stance_start + 2 * n)
        u = np.where(local < n, 0.0, (local - n + 1) / (n + 1))
        track = prev + u[:, None] * (nxt - prev)
        track[:, 1] = -lift * np.sin(np.pi * u)
        feet.append(track)
    return np.stack(feet, axis=1)


def _check_swing_speed(cfg: SceneConfig, feet: np.ndarray) -> None:
    stance = stance_mask(cfg)
    moving = ~(stance[:-1] & stance[1:])
    if not moving.any():
        return
    horizontal = np.linalg.norm(np.diff(feet, axis=0)[..., [0, 2]], axis=-1) * cfg.fps
    slowest = float(horizontal[moving].min())
    if slowest <= CONTACT_SPEED_MPS:
        raise ConfigError(
            f"swing speed {slowest:.3f} m/s does not exceed the {CONTACT_SPEED_MPS} m/s contact threshold; "
            "increase the walking speed or the cadence"
        )


def look_at(eye: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Camera orientations (N, 3, 3) with columns [right, down, forward]."""
    f = target - eye
    f = f / np.linalg.norm(f, axis=-1, keepdims=True)
    down = E_Y - np.sum(f * E_Y, axis=-1, keepdims=True) * f
    norm = np.linalg.norm(down, axis=-1, keepdims=True)
    if np.any(norm < 1e-9):
        raise DegenerateInputError("camera looks straight along the gravity axis")
    down = down / norm
    right = np.cross(down, f)
    return np.stack([right, down, f], axis=-1)


def _camera_track(
    cfg: SceneConfig, root: np.ndarray, heading: np.ndarray, times: np.ndarray, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    rig = cfg.rig
    T = len(times)
    center = path_center(cfg)
    if rig.kind == "static":
        eye = np.broadcast_to(center + np.array([-rig.radius, -rig.height, 0.0]), (T, 3)).copy()
        target = np.broadcast_to(root[0], (T, 3))
    elif rig.kind == "orbit":
        angle = rig.angular_rate * times
        eye = np.stack(
            [center[0] + rig.radius * np.sin(angle), np.full(T, -rig.height), center[2] - rig.radius * np.cos(angle)],
            axis=-1,
        )
        target = root
    else:
        forward = np.stack([np.sin(heading), np.zeros(T), np.cos(heading)], axis=-1)
        eye = root - rig.distance * forward
        eye[:, 1] = -rig.height
        target = root
    rotations = look_at(eye, target)
    if rig.kind == "handheld":
        phases = rng.uniform(0.0, 2 * np.pi, size=3)
        shake = rig.handheld_amplitude * np.sin(2 * np.pi * rig.handheld_frequency * times[:, None] + phases)
        rotations = rotations @ Rotation.from_rotvec(shake).as_matrix()
    return eye, rotations


def generate_scene(cfg: SceneConfig, seed: int = 0) -> Scene:
    """Ground-truth camera and human motion for ``cfg``; bit-identical for equal (cfg, seed)."""
    rng = make_rng(seed)
    times = np.arange(cfg.frames) / cfg.fps
    root, heading = root_path(cfg, times)
    human_rots = batch_yaw_rotation(heading)
    feet = _foot_tracks(cfg)
    _check_swing_speed(cfg, feet)
    joints = np.concatenate([root[:, None, :], feet], axis=1)
    human = MotionSequence(
        fps=cfg.fps,
        rotations=human_rots,
        positions=root,
        local_velocities=differentiate_trajectory(root, human_rots),
        joints=joints,
        contacts=generate_contact_labels(feet, cfg.fps),
        joint_names=DEFAULT_JOINT_NAMES,
    )
    cam_pos, cam_rots = _camera_track(cfg, root, heading, times, rng)
    camera = MotionSequence(
        fps=cfg.fps,
        rotations=cam_rots,
        positions=cam_pos,
        local_velocities=differentiate_trajectory(cam_pos, cam_rots),
    )
    logger.debug(
        "generated %d-frame scene (path=%s, rig=%s, seed=%d)", cfg.frames, cfg.path.kind, cfg.rig.kind, seed
    )
    return Scene(camera=camera, human=human)
