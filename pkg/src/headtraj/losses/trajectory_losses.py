"""Direct prediction loss, bidirectional teacher-forcing trajectory loss, and the weighted total.

The trajectory loss integrates two trajectories, each replacing one
predicted factor by ground truth:

    orientation-fixed:  Integrate(v_pred, R_gt)
    velocity-fixed:     Integrate(v_gt, R_pred)

and sums, over frames, their Euclidean distances to the ground-truth track
(an L1 sum of per-frame L2 errors, invariant to re-yawing every trajectory
together). Both integrations start at the ground-truth origin. Each branch
is divided by the frame count T so values compare across sequence lengths
(``normalize=False`` gives the raw sum).

Every function accepts an optional leading batch axis on the predicted
inputs and then returns one value per batch row.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from headtraj.config import LossWeights
from headtraj.exceptions import PreconditionError
from headtraj.trajectory.integration import integrate_trajectory


@dataclass(frozen=True)
class PredictionVector:
    """Flat encoded outputs with a parallel supervision mask."""

    values: np.ndarray
    mask: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        mask = np.asarray(self.mask, dtype=bool)
        if mask.shape != values.shape[-1:]:
            raise PreconditionError(f"mask length {mask.shape} does not match values {values.shape}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mask", mask)

    @classmethod
    def unmasked(cls, values: np.ndarray) -> "PredictionVector":
        values = np.asarray(values, dtype=np.float64)
        return cls(values=values, mask=np.ones(values.shape[-1], dtype=bool))


def _scalar_or_array(x: np.ndarray) -> float | np.ndarray:
    return float(x) if np.ndim(x) == 0 else x


def simple_loss(pred: PredictionVector, gt: PredictionVector) -> float | np.ndarray:
    """Mean squared error over masked-in entries; 0 when everything is masked out."""
    if pred.values.shape[-1] != gt.values.shape[-1]:
        raise PreconditionError(
            f"prediction has {pred.values.shape[-1]} entries, ground truth {gt.values.shape[-1]}"
        )
    if not np.array_equal(pred.mask, gt.mask):
        raise PreconditionError("prediction and ground-truth masks differ")
    count = int(pred.mask.sum())
    if count == 0:
        return _scalar_or_array(np.zeros(pred.values.shape[:-1]))
    diff = (pred.values - gt.values)[..., pred.mask]
    return _scalar_or_array(np.sum(diff * diff, axis=-1) / count)


class TrajectoryBranches(NamedTuple):
    orient_fixed: np.ndarray  # predicted velocity, ground-truth orientation
    vel_fixed: np.ndarray     # ground-truth velocity, predicted orientation


def trajectory_branches(
    v_pred: np.ndarray,
    R_pred: np.ndarray,
    v_gt: np.ndarray,
    R_gt: np.ndarray,
    t_gt: np.ndarray,
) -> TrajectoryBranches:
    t_gt = np.asarray(t_gt, dtype=np.float64)
    v_gt = np.asarray(v_gt, dtype=np.float64)
    R_gt = np.asarray(R_gt, dtype=np.float64)
    v_pred = np.asarray(v_pred, dtype=np.float64)
    R_pred = np.asarray(R_pred, dtype=np.float64)
    T = t_gt.shape[-2]
    if R_gt.shape[-3] != T or R_pred.shape[-3] != T:
        raise PreconditionError(f"orientations must have {T} frames")
    if v_gt.shape[-2] != T - 1 or v_pred.shape[-2] != T - 1:
        raise PreconditionError(f"velocities must have {T - 1} entries")
    origin = t_gt[0]
    return TrajectoryBranches(
        orient_fixed=integrate_trajectory(origin, R_gt, v_pred),
        vel_fixed=integrate_trajectory(origin, R_pred, v_gt),
    )


def teacher_forcing_traj_loss(
    v_pred: np.ndarray,
    R_pred: np.ndarray,
    v_gt: np.ndarray,
    R_gt: np.ndarray,
    t_gt: np.ndarray,
    normalize: bool = True,
) -> float | np.ndarray:
    """Summed per-frame distances of both teacher-forced trajectories to ``t_gt``."""
    t_gt = np.asarray(t_gt, dtype=np.float64)
    branches = trajectory_branches(v_pred, R_pred, v_gt, R_gt, t_gt)
    loss = (
        np.sum(np.linalg.norm(branches.orient_fixed - t_gt, axis=-1), axis=-1)
        + np.sum(np.linalg.norm(branches.vel_fixed - t_gt, axis=-1), axis=-1)
    )
    if normalize:
        loss = loss / t_gt.shape[-2]
    return _scalar_or_array(loss)


def total_loss(
    simple: float | np.ndarray,
    traj_h: float | np.ndarray,
    traj_cam: float | np.ndarray,
    static: float | np.ndarray,
    w: LossWeights | None = None,
) -> float | np.ndarray:
    w = w or LossWeights()
    parts = {"simple": simple, "traj_h": traj_h, "traj_cam": traj_cam, "static": static}
    negative = [k for k, v in parts.items() if np.any(np.asarray(v) < 0)]
    if negative:
        raise PreconditionError(f"loss components must be non-negative: {', '.join(negative)}")
    total = (
        np.asarray(simple, dtype=np.float64)
        + w.lambda_h * np.asarray(traj_h, dtype=np.float64)
        + w.lambda_cam * np.asarray(traj_cam, dtype=np.float64)
        + w.lambda_static * np.asarray(static, dtype=np.float64)
    )
    return _scalar_or_array(total)
