"""Foot contact labels from velocity thresholding, and the static-contact loss."""

from __future__ import annotations

import numpy as np

from headtraj.exceptions import PreconditionError

CONTACT_SPEED_MPS = 0.15


def _feet(foot_positions: np.ndarray) -> np.ndarray:
    feet = np.asarray(foot_positions, dtype=np.float64)
    if feet.ndim != 3 or feet.shape[-1] != 3:
        raise PreconditionError(f"foot positions must be (T, F, 3), got {feet.shape}")
    return feet


def foot_velocities(foot_positions: np.ndarray) -> np.ndarray:
    """Forward differences p[t+1] - p[t], (T-1, F, 3) in m/frame."""
    return np.diff(_feet(foot_positions), axis=0)


def generate_contact_labels(
    foot_positions: np.ndarray,
    fps: float,
    threshold_mps: float = CONTACT_SPEED_MPS,
) -> np.ndarray:
    """label[t, f] is True when foot f moves slower than ``threshold_mps`` from t to t+1.

    The comparison is strict, so a speed exactly at the threshold is not a
    contact. The last frame has no successor and copies the previous label.
    """
    feet = _feet(foot_positions)
    if len(feet) < 2:
        raise PreconditionError("contact labels need at least 2 frames")
    if not fps > 0:
        raise PreconditionError(f"fps must be positive, got {fps}")
    speed = np.linalg.norm(np.diff(feet, axis=0), axis=-1) * fps
    labels = speed < threshold_mps
    return np.concatenate([labels, labels[-1:]], axis=0)


def static_contact_loss(foot_velocities: np.ndarray, contacts: np.ndarray, fps: float) -> float:
    """Mean foot speed (m/s) over contact-labeled (frame, foot) pairs; 0 without contacts.

    ``contacts`` may carry one extra trailing frame (per-frame labels of a
    T-frame sequence against its T-1 velocities); that frame is ignored.
    """
    vel = np.asarray(foot_velocities, dtype=np.float64)
    contacts = np.asarray(contacts, dtype=bool)
    if vel.ndim != 3 or vel.shape[-1] != 3:
        raise PreconditionError(f"foot velocities must be (N, F, 3), got {vel.shape}")
    if contacts.shape == (vel.shape[0] + 1, vel.shape[1]):
        contacts = contacts[:-1]
    if contacts.shape != vel.shape[:2]:
        raise PreconditionError(f"contacts shape {contacts.shape} does not match velocities {vel.shape[:2]}")
    if not contacts.any():
        return 0.0
    speed = np.linalg.norm(vel, axis=-1) * fps
    return float(np.mean(speed[contacts]))
