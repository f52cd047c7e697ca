"""Analytical heading decomposition.

Any orientation factors as R = R_yaw R_rp, where R_yaw turns about the world
gravity axis only and R_rp is the roll-pitch remainder. Because the camera
angular velocity is taken in the body frame,

    R_yaw,t+1 R_rp,t+1 = R_yaw,t R_rp,t dR_t

and conjugating by the roll-pitch factors isolates the heading change:

    dR_yaw,t = R_rp,t dR_t R_rp,t+1^T   ( = R_yaw,t^T R_yaw,t+1 )

The heading track is then rebuilt by multiplying the increments onto an
initial yaw, which may be chosen freely (identity at inference): every
relative quantity is invariant to it.

Usage:
    seq = decompose_sequence(camera_rotations)
    world = compose_world_orientation(seq.yaw[t], seq.rp[t], human_in_camera[t])
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.spatial.transform import Rotation

from headtraj.config import HeadingConfig
from headtraj.exceptions import PreconditionError
from headtraj.geometry.so3 import (
    E_X,
    E_Y,
    body_angular_velocities,
    orthonormalize,
    validate_rotation,
    validate_rotations,
)

PURE_YAW_TOL = 1e-5
REPROJECT_INTERVAL = 64


@dataclass(frozen=True)
class HeadingDecomp:
    """One orientation split into its heading and roll-pitch factors."""
    yaw: np.ndarray
    rp: np.ndarray


class HeadingSequence(NamedTuple):
    rp: np.ndarray     # (T, 3, 3)
    yaw: np.ndarray    # (T, 3, 3) integrated heading
    dyaw: np.ndarray   # (T-1, 3, 3) heading angular velocities


def _epsilon(cfg: HeadingConfig | None) -> float:
    return (cfg or HeadingConfig()).epsilon


def yaw_factor(R: np.ndarray, cfg: HeadingConfig | None = None) -> np.ndarray:
    """Heading factor of R (or of each matrix in a (..., 3, 3) stack).

    The forward axis f = R e_z is projected onto the horizontal XZ plane.
    When that projection is shorter than epsilon (camera looking straight up
    or down) the heading falls back to e_x. The factor's columns are
    [r, e_y, f_safe] with r = e_y x f_safe.
    """
    R = np.asarray(R, dtype=np.float64)
    eps = _epsilon(cfg)
    f = R[..., :, 2]
    f_xz = f - f[..., 1:2] * E_Y
    norm = np.linalg.norm(f_xz, axis=-1, keepdims=True)
    degenerate = norm <= eps
    f_safe = np.where(degenerate, E_X, f_xz / np.where(degenerate, 1.0, norm))
    r = np.cross(E_Y, f_safe)
    r = r / np.linalg.norm(r, axis=-1, keepdims=True)
    e_y = np.broadcast_to(E_Y, f_safe.shape)
    return np.stack([r, e_y, f_safe], axis=-1)


def project_to_yaw(R: np.ndarray, cfg: HeadingConfig | None = None) -> np.ndarray:
    """Closest pure-heading rotation in the decomposition sense (the yaw factor)."""
    return yaw_factor(R, cfg)


def decompose_heading(R: np.ndarray, cfg: HeadingConfig | None = None) -> HeadingDecomp:
    R = validate_rotation(R)
    yaw = yaw_factor(R, cfg)
    return HeadingDecomp(yaw=yaw, rp=yaw.T @ R)


def heading_angular_velocity(dR_cam: np.ndarray, rp_t: np.ndarray, rp_next: np.ndarray) -> np.ndarray:
    """Heading change between two frames from the body-frame angular velocity and both roll-pitch factors."""
    return np.asarray(rp_t) @ np.asarray(dR_cam) @ np.asarray(rp_next).T


def heading_angular_velocities(dR_seq: np.ndarray, rp_seq: np.ndarray) -> np.ndarray:
    """Vectorized ``heading_angular_velocity`` over (..., T-1) body velocities and (..., T) roll-pitch factors."""
    dR_seq = np.asarray(dR_seq, dtype=np.float64)
    rp_seq = np.asarray(rp_seq, dtype=np.float64)
    if rp_seq.shape[-3] != dR_seq.shape[-3] + 1:
        raise PreconditionError(
            f"need one more roll-pitch factor than angular velocities, got {rp_seq.shape[-3]} and {dR_seq.shape[-3]}"
        )
    return np.einsum("...tij,...tjk,...tlk->...til", rp_seq[..., :-1, :, :], dR_seq, rp_seq[..., 1:, :, :])


def yaw_impurity(R: np.ndarray, cfg: HeadingConfig | None = None) -> np.ndarray:
    """Geodesic distance between each rotation and its own yaw factor."""
    R = np.asarray(R, dtype=np.float64)
    flat = R.reshape(-1, 3, 3)
    rest = np.einsum("nji,njk->nik", yaw_factor(flat, cfg), flat)
    return Rotation.from_matrix(rest).magnitude().reshape(R.shape[:-2])


def integrate_heading(
    yaw0: np.ndarray,
    deltas: Sequence[np.ndarray] | np.ndarray,
    cfg: HeadingConfig | None = None,
) -> np.ndarray:
    """Recursive heading integration: out[t] = out[t-1] @ deltas[t-1].

    Every REPROJECT_INTERVAL steps the running product is orthonormalized
    and projected back onto a pure yaw to stop off-axis drift.
    Returns a (len(deltas) + 1, 3, 3) stack.
    """
    yaw0 = validate_rotation(yaw0, name="yaw0")
    deltas = np.asarray(deltas, dtype=np.float64).reshape(-1, 3, 3)
    if yaw_impurity(yaw0, cfg) > PURE_YAW_TOL:
        raise PreconditionError("yaw0 is not a pure heading rotation")
    if len(deltas):
        validate_rotations(deltas, name="deltas")
        impurity = yaw_impurity(deltas, cfg)
        bad = np.flatnonzero(impurity > PURE_YAW_TOL)
        if bad.size:
            i = int(bad[0])
            raise PreconditionError(
                f"deltas[{i}] is not a pure heading rotation (off-axis {impurity[i]:.3g} rad)"
            )

    out = np.empty((len(deltas) + 1, 3, 3))
    out[0] = yaw0
    current = yaw0
    for i, delta in enumerate(deltas, start=1):
        current = current @ delta
        if i % REPROJECT_INTERVAL == 0:
            current = yaw_factor(orthonormalize(current), cfg)
        out[i] = current
    return out


def integrate_heading_angles(yaw0_angle: np.ndarray | float, delta_angles: np.ndarray) -> np.ndarray:
    """Closed-form heading integration on angles (same-axis rotations commute).

    ``delta_angles`` has shape (..., T-1); the result has shape (..., T).
    """
    delta_angles = np.asarray(delta_angles, dtype=np.float64)
    start = np.broadcast_to(np.asarray(yaw0_angle, dtype=np.float64), delta_angles.shape[:-1])[..., None]
    return np.concatenate([start, start + np.cumsum(delta_angles, axis=-1)], axis=-1)


def compose_world_orientation(yaw: np.ndarray, rp: np.ndarray, R_hc: np.ndarray) -> np.ndarray:
    """Human world orientation from the camera heading, camera roll-pitch and camera-space human orientation."""
    return np.asarray(yaw) @ np.asarray(rp) @ np.asarray(R_hc)


def decompose_sequence(cam_rots: np.ndarray, cfg: HeadingConfig | None = None) -> HeadingSequence:
    cam_rots = validate_rotations(cam_rots, name="cam_rots")
    if len(cam_rots) < 2:
        raise PreconditionError("decompose_sequence needs at least 2 frames")
    yaws = yaw_factor(cam_rots, cfg)
    rp_seq = np.einsum("tji,tjk->tik", yaws, cam_rots)
    dyaw = heading_angular_velocities(body_angular_velocities(cam_rots), rp_seq)
    yaw_seq = integrate_heading(yaws[0], dyaw, cfg)
    return HeadingSequence(rp=rp_seq, yaw=yaw_seq, dyaw=dyaw)
