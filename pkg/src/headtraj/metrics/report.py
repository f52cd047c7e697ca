"""Full metric suite over a predicted and a ground-truth motion."""

from __future__ import annotations

import logging
from typing import NamedTuple

from pydantic import BaseModel, Field

from headtraj.exceptions import DegenerateInputError, PreconditionError
from headtraj.metrics.motion import (
    accel_error,
    camera_space_joints,
    foot_sliding,
    jitter,
    mpjpe,
    pa_mpjpe,
    rte,
    wa_w_mpjpe_100,
)
from headtraj.types import MotionSequence, Scene

logger = logging.getLogger(__name__)

METRIC_KEYS: dict[str, str] = {
    "wa_mpjpe_100": "wa_mpjpe_100_mm",
    "w_mpjpe_100": "w_mpjpe_100_mm",
    "rte": "rte_pct",
    "jitter": "jitter_10m_s3",
    "foot_sliding": "foot_sliding_mm",
    "pa_mpjpe": "pa_mpjpe_mm",
    "mpjpe": "mpjpe_mm",
    "accel": "accel_mm_s2",
}


class MetricsReport(BaseModel):
    """Metric values; a field is None when its input channels were missing."""

    wa_mpjpe_100: float | None = Field(default=None, ge=0)
    w_mpjpe_100: float | None = Field(default=None, ge=0)
    rte: float | None = Field(default=None, ge=0)
    jitter: float | None = Field(default=None, ge=0)
    foot_sliding: float | None = Field(default=None, ge=0)
    pa_mpjpe: float | None = Field(default=None, ge=0)
    mpjpe: float | None = Field(default=None, ge=0)
    accel: float | None = Field(default=None, ge=0)

    def to_json_dict(self) -> dict[str, float]:
        return {METRIC_KEYS[k]: v for k, v in self.model_dump().items() if v is not None}


class Evaluation(NamedTuple):
    report: MetricsReport
    omitted: dict[str, str]   # json key -> reason
    gt_jitter: float | None


def evaluate_sequences(
    pred: MotionSequence,
    gt: MotionSequence,
    *,
    pred_camera: MotionSequence | None = None,
    gt_camera: MotionSequence | None = None,
) -> Evaluation:
    """Compute every metric the inputs support.

    Joint accuracy (MPJPE, PA-MPJPE, accel) is measured in camera space when
    both camera tracks are given, in world space otherwise. Jitter and foot
    sliding describe ``pred`` alone; foot sliding uses the ground-truth
    contact labels.
    """
    if pred.frames != gt.frames:
        raise PreconditionError(f"pred has {pred.frames} frames, gt {gt.frames}")
    if pred.fps != gt.fps:
        raise PreconditionError(f"pred fps {pred.fps} differs from gt fps {gt.fps}")
    if pred.joint_names != gt.joint_names:
        raise PreconditionError(f"joint names differ: {pred.joint_names} vs {gt.joint_names}")
    if (pred.joints is None) != (gt.joints is None):
        raise PreconditionError("only one of pred and gt has joints")

    values: dict[str, float] = {}
    omitted: dict[str, str] = {}

    def skip(field: str, reason: str) -> None:
        omitted[METRIC_KEYS[field]] = reason

    try:
        values["rte"] = rte(pred.positions, gt.positions, pred.rotations, gt.rotations)
    except DegenerateInputError as exc:
        skip("rte", str(exc))

    gt_jitter = None
    if gt.joints is None:
        for field in ("wa_mpjpe_100", "w_mpjpe_100", "mpjpe", "pa_mpjpe", "accel", "jitter", "foot_sliding"):
            skip(field, "no joints")
    else:
        values["wa_mpjpe_100"], values["w_mpjpe_100"] = wa_w_mpjpe_100(pred, gt)
        if pred_camera is not None and gt_camera is not None:
            pred_j = camera_space_joints(pred, pred_camera)
            gt_j = camera_space_joints(gt, gt_camera)
        else:
            pred_j, gt_j = pred.joints, gt.joints
        values["mpjpe"] = mpjpe(pred_j, gt_j)
        if gt_j.shape[1] >= 3:
            values["pa_mpjpe"] = pa_mpjpe(pred_j, gt_j)
        else:
            skip("pa_mpjpe", "fewer than 3 joints")
        if gt.frames >= 3:
            values["accel"] = accel_error(pred_j, gt_j, gt.fps)
        else:
            skip("accel", "fewer than 3 frames")
        if gt.frames >= 4:
            values["jitter"] = jitter(pred.joints, pred.fps)
            gt_jitter = jitter(gt.joints, gt.fps)
        else:
            skip("jitter", "fewer than 4 frames")
        if gt.contacts is None:
            skip("foot_sliding", "ground truth has no contacts")
        else:
            values["foot_sliding"] = foot_sliding(pred.foot_positions(), gt.contacts, pred.fps)

    if omitted:
        logger.info("omitted metrics: %s", ", ".join(sorted(omitted)))
    return Evaluation(MetricsReport(**values), omitted, gt_jitter)


def evaluate_scenes(pred: Scene, gt: Scene) -> Evaluation:
    return evaluate_sequences(pred.human, gt.human, pred_camera=pred.camera, gt_camera=gt.camera)
