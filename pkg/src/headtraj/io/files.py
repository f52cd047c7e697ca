"""JSON file formats: scenes, observations, decompositions, reports and fits.

Rotations are stored as row-major 9-number arrays, vectors as [x, y, z].
Every loader raises FileFormatError for unreadable JSON, missing fields,
inconsistent lengths or invalid rotations.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import orjson
from pydantic import BaseModel, Field, ValidationError

from headtraj.exceptions import FileFormatError, PreconditionError
from headtraj.geometry.so3 import CONVENTION
from headtraj.heading.decomposition import HeadingSequence
from headtraj.metrics.motion import SegmentError
from headtraj.metrics.report import Evaluation
from headtraj.solver.optimizer import FitResult
from headtraj.types import Anchor, MotionSequence, Observations, Scene
from headtraj.utils import atomic_write_bytes, atomic_write_json, json_loads

FORMAT_VERSION = "1"

Vec3 = list[float]
Mat9 = list[float]


# --- File Models ---

class SequenceModel(BaseModel):
    rotations: list[Mat9]
    positions: list[Vec3]
    local_velocities: list[Vec3] | None = None
    joints: list[list[Vec3]] | None = None
    contacts: list[list[bool]] | None = None
    joint_names: list[str] = Field(default_factory=list)


class SceneModel(BaseModel):
    version: str = FORMAT_VERSION
    fps: float
    convention: str = CONVENTION
    camera: SequenceModel
    human: SequenceModel
    meta: dict[str, Any] = Field(default_factory=dict)


class AnchorModel(BaseModel):
    yaw0: Mat9
    camera_t0: Vec3
    human_t0: Vec3


class ObservationsModel(BaseModel):
    version: str = FORMAT_VERSION
    fps: float
    convention: str = CONVENTION
    rp: list[Mat9]
    body_angular_velocity: list[Mat9]
    camera_local_velocity: list[Vec3]
    human_local_velocity: list[Vec3]
    hc_rotations: list[Mat9]
    hc_translation0: Vec3 = Field(default_factory=lambda: [0.0, 0.0, 0.0])
    joint_offsets: list[list[Vec3]] | None = None
    joint_names: list[str] = Field(default_factory=list)
    anchor: AnchorModel | None = None
    meta: dict[str, Any] = Field(default_factory=dict)


OBSERVATION_CHANNELS = (
    "fps", "rp", "body_angular_velocity", "camera_local_velocity", "human_local_velocity", "hc_rotations",
)


# --- Encoding helpers ---

def _mats(values: Sequence[Sequence[float]], name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 9:
        raise FileFormatError(f"{name}: expected per-frame 9-number rotations, got shape {arr.shape}")
    return arr.reshape(-1, 3, 3)


def _flat(mats: np.ndarray) -> np.ndarray:
    return np.asarray(mats).reshape(-1, 9)


def _read(path: Path | str) -> dict[str, Any]:
    try:
        data = json_loads(Path(path).read_bytes())
    except FileNotFoundError as exc:
        raise FileFormatError(f"{path}: no such file") from exc
    except orjson.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise FileFormatError(f"{path}: expected a JSON object")
    return data


def _validate(model: type[BaseModel], data: dict[str, Any], path: Path | str) -> Any:
    try:
        parsed = model.model_validate(data)
    except ValidationError as exc:
        problems = "; ".join(f"{'.'.join(map(str, e['loc']))}: {e['msg']}" for e in exc.errors()[:5])
        raise FileFormatError(f"{path}: {problems}") from exc
    if getattr(parsed, "version", FORMAT_VERSION) != FORMAT_VERSION:
        raise FileFormatError(f"{path}: unsupported version {parsed.version!r}")
    if getattr(parsed, "convention", CONVENTION) != CONVENTION:
        raise FileFormatError(f"{path}: unsupported convention {parsed.convention!r}")
    return parsed


def load_model(path: Path | str, model: type[BaseModel]) -> Any:
    """Read a JSON file into any pydantic model (configuration files)."""
    return _validate(model, _read(path), path)


# --- Scenes ---

def _sequence_dict(seq: MotionSequence) -> dict[str, Any]:
    out: dict[str, Any] = {
        "rotations": _flat(seq.rotations),
        "positions": seq.positions,
        "joint_names": list(seq.joint_names),
    }
    if seq.local_velocities is not None:
        out["local_velocities"] = seq.local_velocities
    if seq.joints is not None:
        out["joints"] = seq.joints
    if seq.contacts is not None:
        out["contacts"] = seq.contacts.tolist()
    return out


def _sequence(model: SequenceModel, fps: float, name: str) -> MotionSequence:
    return MotionSequence(
        fps=fps,
        rotations=_mats(model.rotations, f"{name}.rotations"),
        positions=model.positions,
        local_velocities=model.local_velocities,
        joints=model.joints,
        contacts=model.contacts,
        joint_names=tuple(model.joint_names),
    )


def scene_to_dict(scene: Scene, meta: dict[str, Any] | None = None) -> dict[str, Any]:
    return {
        "version": FORMAT_VERSION,
        "fps": scene.fps,
        "convention": CONVENTION,
        "camera": _sequence_dict(scene.camera),
        "human": _sequence_dict(scene.human),
        "meta": meta or {},
    }


def save_scene(path: Path | str, scene: Scene, meta: dict[str, Any] | None = None) -> Path:
    return atomic_write_json(path, scene_to_dict(scene, meta))


def load_scene(path: Path | str) -> Scene:
    parsed: SceneModel = _validate(SceneModel, _read(path), path)
    try:
        return Scene(
            camera=_sequence(parsed.camera, parsed.fps, "camera"),
            human=_sequence(parsed.human, parsed.fps, "human"),
        )
    except (PreconditionError, ValueError) as exc:
        raise FileFormatError(f"{path}: {exc}") from exc


# --- Observations ---

def observations_to_dict(obs: Observations, meta: dict[str, Any] | None = None) -> dict[str, Any]:
    out: dict[str, Any] = {
        "version": FORMAT_VERSION,
        "fps": obs.fps,
        "convention": CONVENTION,
        "rp": _flat(obs.rp),
        "body_angular_velocity": _flat(obs.body_angular_velocity),
        "camera_local_velocity": obs.camera_local_velocity,
        "human_local_velocity": obs.human_local_velocity,
        "hc_rotations": _flat(obs.hc_rotations),
        "hc_translation0": obs.hc_translation0,
        "joint_names": list(obs.joint_names),
        "meta": meta or {},
    }
    if obs.joint_offsets is not None:
        out["joint_offsets"] = obs.joint_offsets
    if obs.anchor is not None:
        out["anchor"] = {
            "yaw0": obs.anchor.yaw0.reshape(9),
            "camera_t0": obs.anchor.camera_t0,
            "human_t0": obs.anchor.human_t0,
        }
    return out


def save_observations(path: Path | str, obs: Observations, meta: dict[str, Any] | None = None) -> Path:
    return atomic_write_json(path, observations_to_dict(obs, meta))


def observations_from_dict(data: dict[str, Any], source: Path | str = "<observations>") -> Observations:
    missing = [k for k in OBSERVATION_CHANNELS if k not in data]
    if missing:
        raise FileFormatError(f"{source}: missing channels: {', '.join(missing)}")
    parsed: ObservationsModel = _validate(ObservationsModel, data, source)
    try:
        anchor = None
        if parsed.anchor is not None:
            anchor = Anchor(
                yaw0=_mats([parsed.anchor.yaw0], "anchor.yaw0")[0],
                camera_t0=parsed.anchor.camera_t0,
                human_t0=parsed.anchor.human_t0,
            )
        return Observations(
            fps=parsed.fps,
            rp=_mats(parsed.rp, "rp"),
            body_angular_velocity=_mats(parsed.body_angular_velocity, "body_angular_velocity"),
            camera_local_velocity=np.asarray(parsed.camera_local_velocity, dtype=np.float64).reshape(-1, 3),
            human_local_velocity=np.asarray(parsed.human_local_velocity, dtype=np.float64).reshape(-1, 3),
            hc_rotations=_mats(parsed.hc_rotations, "hc_rotations"),
            hc_translation0=parsed.hc_translation0,
            joint_offsets=parsed.joint_offsets,
            joint_names=tuple(parsed.joint_names),
            anchor=anchor,
        )
    except (PreconditionError, ValueError) as exc:
        raise FileFormatError(f"{source}: {exc}") from exc


def load_observations(path: Path | str) -> Observations:
    return observations_from_dict(_read(path), path)


# --- Decompositions, reports, fits ---

def save_decomposition(path: Path | str, seq: HeadingSequence, residual: float, source: str = "") -> Path:
    return atomic_write_json(path, {
        "version": FORMAT_VERSION,
        "convention": CONVENTION,
        "yaw": _flat(seq.yaw),
        "rp": _flat(seq.rp),
        "dyaw": _flat(seq.dyaw),
        "meta": {"max_reconstruction_residual": residual, "input": source},
    })


def save_report(path: Path | str, evaluation: Evaluation, meta: dict[str, Any]) -> Path:
    meta = dict(meta)
    meta["omitted"] = evaluation.omitted
    if evaluation.gt_jitter is not None:
        meta["gt_jitter_10m_s3"] = evaluation.gt_jitter
    return atomic_write_json(path, {"metrics": evaluation.report.to_json_dict(), "meta": meta})


def save_segments_csv(path: Path | str, rows: Sequence[SegmentError]) -> Path:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["segment", "start", "end", "wa_mpjpe_100_mm", "w_mpjpe_100_mm"])
    for row in rows:
        writer.writerow([row.index, row.start, row.end, repr(row.wa_mpjpe_100), repr(row.w_mpjpe_100)])
    return atomic_write_bytes(path, buf.getvalue().encode("utf-8"))


def save_fit(path: Path | str, fitted: Observations, result: FitResult, meta: dict[str, Any] | None = None) -> Path:
    out = observations_to_dict(fitted, meta)
    out["loss_history"] = list(result.state.loss_history)
    out["iterations"] = result.iterations
    out["termination"] = result.termination
    return atomic_write_json(path, out)


def save_fit_report(path: Path | str, before: Evaluation, after: Evaluation, meta: dict[str, Any]) -> Path:
    meta = dict(meta)
    meta["omitted"] = after.omitted
    return atomic_write_json(path, {
        "metrics": {"before": before.report.to_json_dict(), "after": after.report.to_json_dict()},
        "meta": meta,
    })
