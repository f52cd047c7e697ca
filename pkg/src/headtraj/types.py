"""Core data types for headtraj.

All containers are frozen dataclasses over float64 ``numpy`` arrays. Arrays
are copied and marked read-only on construction, so a value never changes
after it is built.

Shape conventions (T frames, J joints, F feet):

    rotations          (T, 3, 3)
    positions          (T, 3)      meters
    local_velocities   (T-1, 3)    meters/frame, expressed in frame t
    joints             (T, J, 3)   meters, world
    contacts           (T, F)      bool
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from headtraj.exceptions import PreconditionError
from headtraj.geometry.so3 import validate_rotation, validate_rotations

DEFAULT_JOINT_NAMES: tuple[str, ...] = ("root", "left_foot", "right_foot")


def _frozen(values: Any, shape_tail: tuple[int, ...], name: str, dtype: Any = np.float64) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    if arr.ndim != len(shape_tail) + 1 or arr.shape[1:] != shape_tail:
        raise PreconditionError(f"{name}: expected shape (N, {', '.join(map(str, shape_tail))}), got {arr.shape}")
    if dtype is np.float64 and not np.all(np.isfinite(arr)):
        raise PreconditionError(f"{name}: non-finite values")
    arr.flags.writeable = False
    return arr


def _check_fps(fps: float) -> float:
    fps = float(fps)
    if not np.isfinite(fps) or fps <= 0:
        raise PreconditionError(f"fps must be finite and positive, got {fps}")
    return fps


@dataclass(frozen=True)
class MotionSequence:
    """Per-frame world orientations and positions of one body (human root or camera)."""

    fps: float
    rotations: np.ndarray
    positions: np.ndarray
    local_velocities: np.ndarray | None = None
    joints: np.ndarray | None = None
    contacts: np.ndarray | None = None
    joint_names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        set_ = object.__setattr__
        set_(self, "fps", _check_fps(self.fps))
        rotations = _frozen(self.rotations, (3, 3), "rotations")
        validate_rotations(rotations)
        set_(self, "rotations", rotations)
        set_(self, "positions", _frozen(self.positions, (3,), "positions"))
        T = len(rotations)
        if T < 1:
            raise PreconditionError("a motion sequence needs at least one frame")
        if len(self.positions) != T:
            raise PreconditionError(f"positions has {len(self.positions)} frames, rotations {T}")
        if self.local_velocities is not None:
            v = _frozen(np.reshape(self.local_velocities, (-1, 3)), (3,), "local_velocities")
            if len(v) != T - 1:
                raise PreconditionError(f"local_velocities must have {T - 1} entries, got {len(v)}")
            set_(self, "local_velocities", v)
        if self.joints is not None:
            joints = np.array(self.joints, dtype=np.float64)
            if joints.ndim != 3 or joints.shape[0] != T or joints.shape[2] != 3:
                raise PreconditionError(f"joints must have shape ({T}, J, 3), got {joints.shape}")
            if not np.all(np.isfinite(joints)):
                raise PreconditionError("joints: non-finite values")
            joints.flags.writeable = False
            set_(self, "joints", joints)
            names = tuple(self.joint_names) or (
                DEFAULT_JOINT_NAMES if joints.shape[1] == len(DEFAULT_JOINT_NAMES) else ()
            )
            if names and len(names) != joints.shape[1]:
                raise PreconditionError(f"{len(names)} joint names for {joints.shape[1]} joints")
            set_(self, "joint_names", names)
        else:
            set_(self, "joint_names", tuple(self.joint_names))
        if self.contacts is not None:
            contacts = np.array(self.contacts, dtype=bool)
            if contacts.ndim != 2 or contacts.shape[0] != T:
                raise PreconditionError(f"contacts must have shape ({T}, F), got {contacts.shape}")
            if len(self.foot_indices) != contacts.shape[1]:
                raise PreconditionError(
                    f"contacts has {contacts.shape[1]} feet, joints name {len(self.foot_indices)}"
                )
            contacts.flags.writeable = False
            set_(self, "contacts", contacts)

    @property
    def frames(self) -> int:
        return len(self.rotations)

    @property
    def foot_indices(self) -> list[int]:
        return [i for i, name in enumerate(self.joint_names) if name.endswith("foot")]

    def foot_positions(self) -> np.ndarray:
        """(T, F, 3) world positions of the joints named ``*foot``."""
        if self.joints is None:
            raise PreconditionError("sequence has no joints")
        return self.joints[:, self.foot_indices, :]

    def local_frame_joints(self) -> np.ndarray:
        """Joints expressed in each frame's root basis, relative to the root position."""
        if self.joints is None:
            raise PreconditionError("sequence has no joints")
        rel = self.joints - self.positions[:, None, :]
        return np.einsum("tji,tnj->tni", self.rotations, rel)

    def replace(self, **changes: Any) -> "MotionSequence":
        return replace(self, **changes)


@dataclass(frozen=True)
class Scene:
    """Paired ground-truth camera and human motion."""

    camera: MotionSequence
    human: MotionSequence

    def __post_init__(self) -> None:
        if self.camera.frames != self.human.frames:
            raise PreconditionError(
                f"camera has {self.camera.frames} frames, human {self.human.frames}"
            )
        if self.camera.fps != self.human.fps:
            raise PreconditionError("camera and human fps differ")

    @property
    def frames(self) -> int:
        return self.human.frames

    @property
    def fps(self) -> float:
        return self.human.fps


@dataclass(frozen=True)
class Anchor:
    """Ground-truth world placement of frame 0, used instead of the identity heading."""

    yaw0: np.ndarray
    camera_t0: np.ndarray
    human_t0: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "yaw0", validate_rotation(self.yaw0, name="anchor.yaw0").copy())
        for name in ("camera_t0", "human_t0"):
            vec = np.array(getattr(self, name), dtype=np.float64)
            if vec.shape != (3,) or not np.all(np.isfinite(vec)):
                raise PreconditionError(f"anchor.{name} must be a finite 3-vector")
            object.__setattr__(self, name, vec)


@dataclass(frozen=True)
class Observations:
    """What an estimator sees per frame: the quantities the reconstruction consumes.

    ``rp`` and ``hc_rotations`` have T entries; angular and local velocities
    have T-1. ``joint_offsets`` are joints in the human root frame.
    """

    fps: float
    rp: np.ndarray
    body_angular_velocity: np.ndarray
    camera_local_velocity: np.ndarray
    human_local_velocity: np.ndarray
    hc_rotations: np.ndarray
    hc_translation0: np.ndarray = field(default_factory=lambda: np.zeros(3))
    joint_offsets: np.ndarray | None = None
    joint_names: tuple[str, ...] = ()
    anchor: Anchor | None = None

    def __post_init__(self) -> None:
        set_ = object.__setattr__
        set_(self, "fps", _check_fps(self.fps))
        rp = _frozen(self.rp, (3, 3), "rp")
        T = len(rp)
        if T < 2:
            raise PreconditionError("observations need at least 2 frames")
        validate_rotations(rp, name="rp")
        set_(self, "rp", rp)
        hc = _frozen(self.hc_rotations, (3, 3), "hc_rotations")
        validate_rotations(hc, name="hc_rotations")
        set_(self, "hc_rotations", hc)
        dR = _frozen(np.reshape(self.body_angular_velocity, (-1, 3, 3)), (3, 3), "body_angular_velocity")
        validate_rotations(dR, name="body_angular_velocity")
        set_(self, "body_angular_velocity", dR)
        for name in ("camera_local_velocity", "human_local_velocity"):
            set_(self, name, _frozen(np.reshape(getattr(self, name), (-1, 3)), (3,), name))
        counts = {
            "rp": T,
            "hc_rotations": len(hc),
            "body_angular_velocity": len(dR) + 1,
            "camera_local_velocity": len(self.camera_local_velocity) + 1,
            "human_local_velocity": len(self.human_local_velocity) + 1,
        }
        mismatched = [k for k, n in counts.items() if n != T]
        if mismatched:
            raise PreconditionError(f"inconsistent lengths for {', '.join(mismatched)} (expected {T} frames)")
        t0 = np.array(self.hc_translation0, dtype=np.float64)
        if t0.shape != (3,) or not np.all(np.isfinite(t0)):
            raise PreconditionError("hc_translation0 must be a finite 3-vector")
        set_(self, "hc_translation0", t0)
        if self.joint_offsets is not None:
            offsets = np.array(self.joint_offsets, dtype=np.float64)
            if offsets.ndim != 3 or offsets.shape[0] != T or offsets.shape[2] != 3:
                raise PreconditionError(f"joint_offsets must have shape ({T}, J, 3), got {offsets.shape}")
            offsets.flags.writeable = False
            set_(self, "joint_offsets", offsets)
        set_(self, "joint_names", tuple(self.joint_names))

    @property
    def frames(self) -> int:
        return len(self.rp)

    def replace(self, **changes: Any) -> "Observations":
        return replace(self, **changes)
