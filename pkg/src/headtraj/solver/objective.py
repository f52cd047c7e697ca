"""Parameter layout and the batched training-style objective.

Parameter vector of a T-frame problem (2T + 6(T-1) entries):

    [ pitch_0, roll_0, ..., pitch_{T-1}, roll_{T-1} ]   camera roll-pitch factors
    [ camera local velocities, (T-1) x 3 ]
    [ human local velocities,  (T-1) x 3 ]

Roll-pitch factors are rp = Rx(pitch) Rz(roll), which never carries a yaw
component. The camera heading is rebuilt from the observed body angular
velocities exactly as the reconstruction does, starting from the
supervision's initial heading.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from headtraj.config import LossWeights
from headtraj.exceptions import PreconditionError
from headtraj.geometry.so3 import batch_rot_x, batch_rot_z, batch_yaw_rotation, yaw_angle
from headtraj.heading.decomposition import heading_angular_velocities, integrate_heading_angles
from headtraj.losses.trajectory_losses import PredictionVector, simple_loss, teacher_forcing_traj_loss, total_loss
from headtraj.trajectory.integration import differentiate_trajectory
from headtraj.types import Observations, Scene


def parameter_count(T: int) -> int:
    return 2 * T + 6 * (T - 1)


def rp_from_angles(angles: np.ndarray) -> np.ndarray:
    """(..., T, 2) (pitch, roll) -> (..., T, 3, 3) roll-pitch rotations."""
    angles = np.asarray(angles, dtype=np.float64)
    return batch_rot_x(angles[..., 0]) @ batch_rot_z(angles[..., 1])


def angles_from_rp(rp: np.ndarray) -> np.ndarray:
    """Inverse of ``rp_from_angles`` for yaw-free rotations with a forward-facing Z axis."""
    rp = np.asarray(rp, dtype=np.float64)
    f = rp[..., :, 2]
    pitch = np.arctan2(-f[..., 1], f[..., 2])
    M = np.swapaxes(batch_rot_x(pitch), -1, -2) @ rp
    roll = np.arctan2(M[..., 1, 0], M[..., 0, 0])
    return np.stack([pitch, roll], axis=-1)


@dataclass(frozen=True)
class SolverState:
    rp_params: np.ndarray          # (T, 2) pitch, roll
    camera_velocities: np.ndarray  # (T-1, 3)
    human_velocities: np.ndarray   # (T-1, 3)
    loss_history: tuple[float, ...] = field(default=())

    @property
    def frames(self) -> int:
        return len(self.rp_params)

    def to_vector(self) -> np.ndarray:
        return np.concatenate(
            [self.rp_params.ravel(), self.camera_velocities.ravel(), self.human_velocities.ravel()]
        )

    @classmethod
    def from_vector(cls, x: np.ndarray, T: int, loss_history: tuple[float, ...] = ()) -> "SolverState":
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (parameter_count(T),):
            raise PreconditionError(f"expected {parameter_count(T)} parameters for {T} frames, got {x.shape}")
        angles, cam_v, human_v = _split(x, T)
        return cls(angles.copy(), cam_v.copy(), human_v.copy(), tuple(loss_history))

    @classmethod
    def from_observations(cls, obs: Observations) -> "SolverState":
        return cls(
            rp_params=angles_from_rp(obs.rp),
            camera_velocities=np.array(obs.camera_local_velocity),
            human_velocities=np.array(obs.human_local_velocity),
        )

    def rp_rotations(self) -> np.ndarray:
        return rp_from_angles(self.rp_params)


def _split(X: np.ndarray, T: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    lead = X.shape[:-1]
    a, b = 2 * T, 2 * T + 3 * (T - 1)
    return (
        X[..., :a].reshape(lead + (T, 2)),
        X[..., a:b].reshape(lead + (T - 1, 3)),
        X[..., b:].reshape(lead + (T - 1, 3)),
    )


class TrajectoryObjective:
    """Loss of parameter vectors against supervision, callable on (P,) or (B, P) arrays.

    total = data_weight * MSE(x, x_obs) + lambda_h * L_traj(human) + lambda_cam * L_traj(camera)
    """

    def __init__(
        self,
        obs: Observations,
        supervision: Scene,
        weights: LossWeights | None = None,
        data_weight: float = 0.1,
    ) -> None:
        if supervision.frames != obs.frames:
            raise PreconditionError(f"observations have {obs.frames} frames, supervision {supervision.frames}")
        if data_weight < 0:
            raise PreconditionError("data_weight must be non-negative")
        self.T = obs.frames
        self.weights = weights or LossWeights()
        self.data_weight = float(data_weight)
        self.dR = np.asarray(obs.body_angular_velocity)
        self.hc = np.asarray(obs.hc_rotations)
        cam, human = supervision.camera, supervision.human
        self.cam_gt = (differentiate_trajectory(cam.positions, cam.rotations), cam.rotations, cam.positions)
        self.human_gt = (differentiate_trajectory(human.positions, human.rotations), human.rotations, human.positions)
        self.yaw0 = float(yaw_angle(cam.rotations[0]))
        self.x_obs = SolverState.from_observations(obs).to_vector()
        self._target = PredictionVector.unmasked(self.x_obs)

    @property
    def size(self) -> int:
        return self.x_obs.size

    def rotations(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Camera and human world orientations implied by parameter vector(s) ``X``."""
        angles, _, _ = _split(X, self.T)
        rp = rp_from_angles(angles)
        delta = yaw_angle(heading_angular_velocities(self.dR, rp))
        yaw = batch_yaw_rotation(integrate_heading_angles(self.yaw0, delta))
        R_cam = yaw @ rp
        return R_cam, R_cam @ self.hc

    def __call__(self, X: np.ndarray) -> float | np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.shape[-1] != self.size:
            raise PreconditionError(f"expected {self.size} parameters, got {X.shape[-1]}")
        _, cam_v, human_v = _split(X, self.T)
        R_cam, R_h = self.rotations(X)
        traj_cam = teacher_forcing_traj_loss(cam_v, R_cam, *self.cam_gt)
        traj_h = teacher_forcing_traj_loss(human_v, R_h, *self.human_gt)
        data = simple_loss(PredictionVector.unmasked(X), self._target)
        return total_loss(self.data_weight * np.asarray(data), traj_h, traj_cam, 0.0, self.weights)


def objective(
    state: SolverState,
    obs: Observations,
    gt: Scene,
    w: LossWeights | None = None,
    data_weight: float = 0.1,
) -> float:
    if state.frames != obs.frames:
        raise PreconditionError(f"state has {state.frames} frames, observations {obs.frames}")
    return float(TrajectoryObjective(obs, gt, w, data_weight)(state.to_vector()))
