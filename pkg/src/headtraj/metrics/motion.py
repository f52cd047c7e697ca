"""Joint-error, trajectory-drift and smoothness metrics.

Positions are in meters; every metric reports in the unit named by its
suffix (mm, percent, mm/s^2, or 10 m/s^3 for jitter).

World-space accuracy is measured over consecutive 100-frame segments:

    WA:  rigid alignment fit on all joints of the segment
    W:   rigid alignment fit on the joints of the segment's first two frames

A trailing segment shorter than 100 frames is kept when it has at least 2
frames.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from headtraj.exceptions import DegenerateInputError, PreconditionError
from headtraj.metrics.alignment import align_frames, procrustes_align, start_align, track_frame
from headtraj.types import MotionSequence

SEGMENT_FRAMES = 100
MIN_PATH_LENGTH = 1e-6
M_TO_MM = 1000.0


class SegmentError(NamedTuple):
    index: int
    start: int
    end: int
    wa_mpjpe_100: float
    w_mpjpe_100: float


def _joint_array(joints: np.ndarray, name: str) -> np.ndarray:
    arr = np.asarray(joints, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[:, None, :]
    if arr.ndim != 3 or arr.shape[-1] != 3:
        raise PreconditionError(f"{name} must be (T, J, 3) or (T, 3), got {arr.shape}")
    return arr


def _pair(pred: np.ndarray, gt: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    pred, gt = _joint_array(pred, "pred"), _joint_array(gt, "gt")
    if pred.shape != gt.shape:
        raise PreconditionError(f"pred {pred.shape} and gt {gt.shape} differ in shape")
    return pred, gt


def _mean_error_mm(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.mean(np.linalg.norm(a - b, axis=-1)) * M_TO_MM)


def mpjpe(pred_joints: np.ndarray, gt_joints: np.ndarray) -> float:
    """Mean joint error after subtracting each frame's root joint (index 0), in mm."""
    pred, gt = _pair(pred_joints, gt_joints)
    return _mean_error_mm(pred - pred[:, :1], gt - gt[:, :1])


def pa_mpjpe(pred_joints: np.ndarray, gt_joints: np.ndarray) -> float:
    """Mean joint error after per-frame similarity alignment, in mm."""
    pred, gt = _pair(pred_joints, gt_joints)
    return _mean_error_mm(align_frames(pred, gt, with_scale=True), gt)


def segment_bounds(T: int, size: int = SEGMENT_FRAMES) -> list[tuple[int, int]]:
    """Half-open [start, end) windows of ``size`` frames; a trailing window needs 2 frames."""
    if T < 2:
        raise PreconditionError(f"segmenting needs at least 2 frames, got {T}")
    bounds = [(s, min(s + size, T)) for s in range(0, T, size)]
    if bounds[-1][1] - bounds[-1][0] < 2:
        bounds.pop()
    return bounds


def _require_joints(seq: MotionSequence, name: str) -> np.ndarray:
    if seq.joints is None:
        raise PreconditionError(f"{name} has no joints")
    return seq.joints


def segment_errors(pred: MotionSequence, gt: MotionSequence) -> list[SegmentError]:
    pred_j, gt_j = _pair(_require_joints(pred, "pred"), _require_joints(gt, "gt"))
    rows = []
    for i, (start, end) in enumerate(segment_bounds(len(gt_j))):
        p, g = pred_j[start:end], gt_j[start:end]
        flat_p, flat_g = p.reshape(-1, 3), g.reshape(-1, 3)
        wa = procrustes_align(flat_p, flat_g).apply(flat_p)
        n_anchor = 2 * p.shape[1]
        w = procrustes_align(flat_p[:n_anchor], flat_g[:n_anchor]).apply(flat_p)
        rows.append(SegmentError(i, start, end, _mean_error_mm(wa, flat_g), _mean_error_mm(w, flat_g)))
    return rows


def wa_w_mpjpe_100(pred: MotionSequence, gt: MotionSequence) -> tuple[float, float]:
    """(WA-MPJPE, W-MPJPE) averaged over 100-frame segments, in mm."""
    rows = segment_errors(pred, gt)
    wa = float(np.mean([r.wa_mpjpe_100 for r in rows]))
    w = float(np.mean([r.w_mpjpe_100 for r in rows]))
    return wa, w


def rte(
    pred_root: np.ndarray,
    gt_root: np.ndarray,
    pred_rotations: np.ndarray | None = None,
    gt_rotations: np.ndarray | None = None,
) -> float:
    """Final-frame root error as a percentage of the ground-truth path length.

    ``pred`` is rigidly moved onto ``gt``: rotated by the frame-0 relative
    orientation gt_rot[0] @ pred_rot[0]^T when both rotation tracks are given,
    otherwise by the rotation between the ``track_frame`` bases of the two
    tracks, then shifted so the centroids of the first two frames coincide.
    Either way the result does not change under a global rigid transform of
    ``pred``.
    """
    pred = np.asarray(pred_root, dtype=np.float64)
    gt = np.asarray(gt_root, dtype=np.float64)
    if pred.shape != gt.shape or pred.ndim != 2 or pred.shape[1] != 3:
        raise PreconditionError(f"root tracks must be matching (T, 3) arrays, got {pred.shape} and {gt.shape}")
    if len(gt) < 2:
        raise PreconditionError("rte needs at least 2 frames")
    path = float(np.sum(np.linalg.norm(np.diff(gt, axis=0), axis=1)))
    if path <= MIN_PATH_LENGTH:
        raise DegenerateInputError(f"ground-truth path length {path:.3g} m is too short for rte")
    if pred_rotations is not None and gt_rotations is not None:
        rotation = np.asarray(gt_rotations)[0] @ np.asarray(pred_rotations)[0].T
    elif np.ptp(pred, axis=0).max() <= MIN_PATH_LENGTH:
        rotation = np.eye(3)
    else:
        rotation = track_frame(gt) @ track_frame(pred).T
    aligned = start_align(pred, gt, rotation)
    return float(np.linalg.norm(aligned[-1] - gt[-1]) / path * 100.0)


def jitter(joints: np.ndarray, fps: float) -> float:
    """Mean jerk magnitude, in units of 10 m/s^3.

    jerk[t] = (p[t+2] - 3 p[t+1] + 3 p[t] - p[t-1]) * fps^3
    """
    p = _joint_array(joints, "joints")
    if len(p) < 4:
        raise PreconditionError(f"jitter needs at least 4 frames, got {len(p)}")
    jerk = (p[3:] - 3 * p[2:-1] + 3 * p[1:-2] - p[:-3]) * fps**3
    return float(np.mean(np.linalg.norm(jerk, axis=-1)) / 10.0)


def foot_sliding(foot_positions: np.ndarray, contacts: np.ndarray, fps: float | None = None) -> float:
    """Mean horizontal (XZ) displacement to the next frame over contact-labeled pairs, in mm.

    The value is a per-frame displacement, so ``fps`` only gets validated and
    never rescales it. The last frame has no successor and is not counted.
    Returns 0 without contacts.
    """
    if fps is not None and not fps > 0:
        raise PreconditionError(f"fps must be positive, got {fps}")
    feet = _joint_array(foot_positions, "foot_positions")
    contacts = np.asarray(contacts, dtype=bool)
    if contacts.ndim == 1:
        contacts = contacts[:, None]
    if contacts.shape != feet.shape[:2]:
        raise PreconditionError(f"contacts {contacts.shape} do not match feet {feet.shape[:2]}")
    step = np.diff(feet, axis=0)[..., [0, 2]]
    mask = contacts[:-1]
    if not mask.any():
        return 0.0
    return float(np.mean(np.linalg.norm(step, axis=-1)[mask]) * M_TO_MM)


def accel_error(pred_joints: np.ndarray, gt_joints: np.ndarray, fps: float) -> float:
    """Mean difference of second-difference accelerations, in mm/s^2."""
    pred, gt = _pair(pred_joints, gt_joints)
    if len(pred) < 3:
        raise PreconditionError(f"accel_error needs at least 3 frames, got {len(pred)}")

    def accel(p: np.ndarray) -> np.ndarray:
        return (p[2:] - 2 * p[1:-1] + p[:-2]) * fps**2

    return _mean_error_mm(accel(pred), accel(gt))


def camera_space_joints(seq: MotionSequence, camera: MotionSequence) -> np.ndarray:
    """Joints of ``seq`` expressed in the per-frame camera basis."""
    joints = _require_joints(seq, "sequence")
    if camera.frames != seq.frames:
        raise PreconditionError(f"camera has {camera.frames} frames, sequence {seq.frames}")
    rel = joints - camera.positions[:, None, :]
    return np.einsum("tji,tnj->tni", camera.rotations, rel)
