"""Fixed-size rotation algebra on 3x3 matrices.

Conventions are fixed: the world Y axis points down along gravity and Z is
forward. Frames are right-handed, and a positive yaw turns +Z toward +X.

Two angular-velocity representations are used throughout:

    body frame:  dRb = R_t^T R_{t+1}      (motion in the body's own axes)
    world frame: dRw = R_{t+1} R_t^T      (motion in world axes)

related by conjugation, dRw = R_t dRb R_t^T.

Rotations are plain ``numpy`` arrays of shape (3, 3); batched helpers take
(..., 3, 3) stacks.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import polar
from scipy.spatial.transform import Rotation

from headtraj.exceptions import DegenerateInputError, InvalidRotationError, PreconditionError

E_X = np.array([1.0, 0.0, 0.0])
E_Y = np.array([0.0, 1.0, 0.0])
E_Z = np.array([0.0, 0.0, 1.0])

GRAVITY_AXIS = E_Y
FORWARD_AXIS = E_Z
CONVENTION = "y-down-z-forward"

INPUT_TOL = 1e-6
INTERNAL_TOL = 1e-12
UNIT_AXIS_TOL = 1e-9

_I3 = np.eye(3)


def is_rotation(M: np.ndarray, tol: float = INPUT_TOL) -> bool:
    """True if ``M`` is a finite 3x3 matrix with M^T M = I and det(M) = +1 within ``tol``."""
    M = np.asarray(M, dtype=np.float64)
    if M.shape != (3, 3) or not np.all(np.isfinite(M)):
        return False
    if np.linalg.norm(M.T @ M - _I3) > tol:
        return False
    return abs(np.linalg.det(M) - 1.0) <= tol


def validate_rotation(M: np.ndarray, tol: float = INPUT_TOL, name: str = "rotation") -> np.ndarray:
    """Return ``M`` as a float array, or raise InvalidRotationError."""
    arr = np.asarray(M, dtype=np.float64)
    if not is_rotation(arr, tol):
        raise InvalidRotationError(f"{name} is not a valid rotation matrix")
    return arr


def validate_rotations(Ms: np.ndarray, tol: float = INPUT_TOL, name: str = "rotations") -> np.ndarray:
    """Vectorized ``validate_rotation`` over an (N, 3, 3) stack."""
    arr = np.asarray(Ms, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[1:] != (3, 3):
        raise PreconditionError(f"{name}: expected shape (N, 3, 3), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidRotationError(f"{name}: non-finite entries")
    gram = np.einsum("nji,njk->nik", arr, arr) - _I3
    ortho = np.sqrt(np.sum(gram * gram, axis=(1, 2)))
    dets = np.linalg.det(arr) if len(arr) else np.zeros(0)
    bad = np.flatnonzero((ortho > tol) | (np.abs(dets - 1.0) > tol))
    if bad.size:
        raise InvalidRotationError(f"{name}[{int(bad[0])}] is not a valid rotation matrix")
    return arr


def from_axis_angle(axis: np.ndarray, angle: float) -> np.ndarray:
    """Right-handed rotation by ``angle`` radians about the unit vector ``axis``."""
    axis = np.asarray(axis, dtype=np.float64)
    if axis.shape != (3,) or abs(np.linalg.norm(axis) - 1.0) > UNIT_AXIS_TOL:
        raise PreconditionError(f"axis must be a unit 3-vector, got {axis}")
    return Rotation.from_rotvec(axis * float(angle)).as_matrix()


def orthonormalize(M: np.ndarray) -> np.ndarray:
    """Nearest rotation to ``M`` in the polar-decomposition sense."""
    M = np.asarray(M, dtype=np.float64)
    if M.shape != (3, 3) or not np.all(np.isfinite(M)):
        raise PreconditionError("orthonormalize expects a finite 3x3 matrix")
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[-1] <= INTERNAL_TOL * max(sv[0], 1.0):
        raise DegenerateInputError("matrix is rank-deficient")
    if np.linalg.det(M) <= 0:
        raise DegenerateInputError("matrix has non-positive determinant")
    U, _ = polar(M, side="right")
    return U


def geodesic_distance(R1: np.ndarray, R2: np.ndarray) -> float:
    """Angle of R1^T R2, in [0, pi]."""
    return float(Rotation.from_matrix(np.asarray(R1).T @ np.asarray(R2)).magnitude())


def body_angular_velocity(R_t: np.ndarray, R_next: np.ndarray) -> np.ndarray:
    return np.asarray(R_t).T @ np.asarray(R_next)


def world_angular_velocity(R_t: np.ndarray, R_next: np.ndarray) -> np.ndarray:
    return np.asarray(R_next) @ np.asarray(R_t).T


def body_to_world_velocity(dRb: np.ndarray, R_t: np.ndarray) -> np.ndarray:
    R_t = np.asarray(R_t)
    return R_t @ np.asarray(dRb) @ R_t.T


def body_angular_velocities(rotations: np.ndarray) -> np.ndarray:
    """Body-frame angular velocities R_t^T R_{t+1} for every consecutive pair of an (T, 3, 3) stack."""
    rotations = np.asarray(rotations, dtype=np.float64)
    return np.einsum("tji,tjk->tik", rotations[:-1], rotations[1:])


def yaw_rotation(angle: float) -> np.ndarray:
    return from_axis_angle(E_Y, angle)


def batch_yaw_rotation(angles: np.ndarray) -> np.ndarray:
    """Pure-yaw rotations for an array of angles; output shape ``angles.shape + (3, 3)``."""
    angles = np.asarray(angles, dtype=np.float64)
    c, s = np.cos(angles), np.sin(angles)
    out = np.zeros(angles.shape + (3, 3))
    out[..., 0, 0] = c
    out[..., 0, 2] = s
    out[..., 1, 1] = 1.0
    out[..., 2, 0] = -s
    out[..., 2, 2] = c
    return out


def batch_rot_x(angles: np.ndarray) -> np.ndarray:
    angles = np.asarray(angles, dtype=np.float64)
    c, s = np.cos(angles), np.sin(angles)
    out = np.zeros(angles.shape + (3, 3))
    out[..., 0, 0] = 1.0
    out[..., 1, 1] = c
    out[..., 1, 2] = -s
    out[..., 2, 1] = s
    out[..., 2, 2] = c
    return out


def batch_rot_z(angles: np.ndarray) -> np.ndarray:
    angles = np.asarray(angles, dtype=np.float64)
    c, s = np.cos(angles), np.sin(angles)
    out = np.zeros(angles.shape + (3, 3))
    out[..., 0, 0] = c
    out[..., 0, 1] = -s
    out[..., 1, 0] = s
    out[..., 1, 1] = c
    out[..., 2, 2] = 1.0
    return out


def yaw_angle(R: np.ndarray) -> np.ndarray | float:
    """Heading angle of the forward axis R e_z about +Y. Accepts (..., 3, 3)."""
    R = np.asarray(R, dtype=np.float64)
    angle = np.arctan2(R[..., 0, 2], R[..., 2, 2])
    return float(angle) if angle.ndim == 0 else angle


def random_rotations(n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` rotations drawn uniformly from SO(3)."""
    return Rotation.random(n, rng).as_matrix().reshape(n, 3, 3)


def small_random_rotations(n: int, std: float, rng: np.random.Generator) -> np.ndarray:
    """Rotations with axis uniform on the sphere and angle ~ Normal(0, std)."""
    if std == 0.0:
        return np.broadcast_to(_I3, (n, 3, 3)).copy()
    axes = rng.normal(size=(n, 3))
    axes /= np.linalg.norm(axes, axis=1, keepdims=True)
    angles = rng.normal(0.0, std, size=n)
    return Rotation.from_rotvec(axes * angles[:, None]).as_matrix().reshape(n, 3, 3)
