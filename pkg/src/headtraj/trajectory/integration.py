"""Dead-reckoning position integration and its exact inverse.

Index convention: v[t] is the displacement from frame t to frame t+1
expressed in frame t's local basis, so

    p[t+1] = p[t] + R[t] v[t]

and ``differentiate_trajectory`` recovers v exactly. Velocities are in
meters per frame; no time step enters.

Both functions accept optional leading batch axes.
"""

from __future__ import annotations

import numpy as np

from headtraj.exceptions import PreconditionError


def integrate_trajectory(t0: np.ndarray, rotations: np.ndarray, local_velocities: np.ndarray) -> np.ndarray:
    """Positions (..., T, 3) from a start point, T orientations and T-1 local velocities."""
    rotations = np.asarray(rotations, dtype=np.float64)
    v = np.asarray(local_velocities, dtype=np.float64)
    t0 = np.asarray(t0, dtype=np.float64)
    if rotations.ndim < 3 or rotations.shape[-2:] != (3, 3):
        raise PreconditionError(f"rotations must be (..., T, 3, 3), got {rotations.shape}")
    if v.ndim < 2 or v.shape[-1] != 3:
        raise PreconditionError(f"local_velocities must be (..., T-1, 3), got {v.shape}")
    if rotations.shape[-3] != v.shape[-2] + 1:
        raise PreconditionError(
            f"need len(rotations) == len(local_velocities) + 1, got {rotations.shape[-3]} and {v.shape[-2]}"
        )
    steps = np.einsum("...tij,...tj->...ti", rotations[..., :-1, :, :], v)
    start = np.broadcast_to(t0, steps.shape[:-2] + (3,))[..., None, :]
    return np.cumsum(np.concatenate([start, steps], axis=-2), axis=-2)


def differentiate_trajectory(positions: np.ndarray, rotations: np.ndarray) -> np.ndarray:
    """Local velocities (..., T-1, 3) such that ``integrate_trajectory`` reproduces ``positions``."""
    positions = np.asarray(positions, dtype=np.float64)
    rotations = np.asarray(rotations, dtype=np.float64)
    if positions.shape[-1] != 3 or rotations.shape[-2:] != (3, 3):
        raise PreconditionError("positions must be (..., T, 3) and rotations (..., T, 3, 3)")
    if positions.shape[-2] != rotations.shape[-3]:
        raise PreconditionError(
            f"positions has {positions.shape[-2]} frames, rotations {rotations.shape[-3]}"
        )
    if positions.shape[-2] < 2:
        raise PreconditionError("differentiate_trajectory needs at least 2 frames")
    deltas = np.diff(positions, axis=-2)
    return np.einsum("...tji,...tj->...ti", rotations[..., :-1, :, :], deltas)
