"""Similarity / rigid point-set alignment (Kabsch with optional Umeyama scale)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from headtraj.exceptions import DegenerateInputError, PreconditionError
from headtraj.geometry.so3 import E_X, E_Y

RANK_TOL = 1e-12
COLLINEAR_TOL = 1e-6
MIN_STEP = 1e-9


@dataclass(frozen=True)
class RigidAlignment:
    """x -> scale * rotation @ x + translation."""

    rotation: np.ndarray
    translation: np.ndarray
    scale: float = 1.0

    def apply(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=np.float64)
        return self.scale * points @ self.rotation.T + self.translation


def _procrustes_batch(P: np.ndarray, Q: np.ndarray, with_scale: bool) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Best (R, t, s) per batch row mapping P (B, N, 3) onto Q (B, N, 3)."""
    mu_p = P.mean(axis=-2)
    mu_q = Q.mean(axis=-2)
    dp = P - mu_p[..., None, :]
    dq = Q - mu_q[..., None, :]
    n = P.shape[-2]
    sigma = np.einsum("bni,bnj->bij", dq, dp) / n
    U, d, Vt = np.linalg.svd(sigma)
    # rank 2 suffices: the reflection fix pins the third axis
    if np.any(d[..., 1] <= RANK_TOL * np.maximum(d[..., 0], 1.0)):
        raise DegenerateInputError("point set is degenerate (rank-deficient covariance)")
    S = np.ones_like(d)
    S[..., 2] = np.sign(np.linalg.det(U) * np.linalg.det(Vt))
    S[S == 0] = 1.0
    R = np.einsum("bij,bj,bjk->bik", U, S, Vt)
    if with_scale:
        var_p = np.sum(dp * dp, axis=(-2, -1)) / n
        s = np.sum(d * S, axis=-1) / var_p
    else:
        s = np.ones(P.shape[0])
    t = mu_q - s[:, None] * np.einsum("bij,bj->bi", R, mu_p)
    return R, t, s


def _points(X: np.ndarray, name: str) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != 3:
        raise PreconditionError(f"{name} must be (N, 3), got {X.shape}")
    return X


def procrustes_align(P: np.ndarray, Q: np.ndarray, with_scale: bool = False) -> RigidAlignment:
    """Transform minimizing sum ||s R P_i + t - Q_i||^2 with det(R) = +1.

    ``with_scale=False`` fixes s = 1 (rigid).
    """
    P, Q = _points(P, "P"), _points(Q, "Q")
    if P.shape != Q.shape:
        raise PreconditionError(f"point sets differ in shape: {P.shape} vs {Q.shape}")
    if len(P) < 3:
        raise PreconditionError(f"alignment needs at least 3 points, got {len(P)}")
    R, t, s = _procrustes_batch(P[None], Q[None], with_scale)
    return RigidAlignment(rotation=R[0], translation=t[0], scale=float(s[0]))


def align_frames(pred: np.ndarray, gt: np.ndarray, with_scale: bool = True) -> np.ndarray:
    """Align each frame of ``pred`` (T, J, 3) onto ``gt`` independently."""
    if pred.shape[-2] < 3:
        raise PreconditionError(f"per-frame alignment needs at least 3 joints, got {pred.shape[-2]}")
    R, t, s = _procrustes_batch(pred, gt, with_scale)
    return s[:, None, None] * np.einsum("bij,bnj->bni", R, pred) + t[:, None, :]


def start_align(pred: np.ndarray, gt: np.ndarray, rotation: np.ndarray, anchor_frames: int = 2) -> np.ndarray:
    """Rotate ``pred`` (T, 3) by ``rotation`` and match the centroid of its first frames to ``gt``."""
    rotated = pred @ np.asarray(rotation).T
    shift = gt[:anchor_frames].mean(axis=0) - rotated[:anchor_frames].mean(axis=0)
    return rotated + shift


def _unit_orthogonal(v: np.ndarray, d: np.ndarray) -> np.ndarray | None:
    v = v - (v @ d) * d
    norm = np.linalg.norm(v)
    return None if norm <= MIN_STEP else v / norm


def track_frame(points: np.ndarray) -> np.ndarray:
    """Orthonormal basis [d, n, d x n] attached to a (T, 3) track.

    ``d`` is the direction of the first displacement away from frame 0 and
    ``n`` the ground normal: the least-variance axis of the track, signed
    toward +Y. A collinear track has no ground plane and takes gravity
    instead, which leaves every point of the track where it is.
    """
    p = np.asarray(points, dtype=np.float64)
    steps = np.linalg.norm(p[1:] - p[0], axis=1)
    moving = np.flatnonzero(steps > MIN_STEP)
    if moving.size == 0:
        raise DegenerateInputError("track never leaves its first position")
    d = (p[moving[0] + 1] - p[0]) / steps[moving[0]]

    n = None
    if len(p) >= 3:
        _, s, Vt = np.linalg.svd(p - p.mean(axis=0), full_matrices=False)
        if s[1] > COLLINEAR_TOL * s[0]:
            n = _unit_orthogonal(Vt[2], d)
    for fallback in (E_Y, E_X):
        if n is None:
            n = _unit_orthogonal(fallback, d)
    if n @ E_Y < 0:
        n = -n
    return np.stack([d, n, np.cross(d, n)], axis=-1)
