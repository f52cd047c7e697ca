"""World-space and camera-space evaluation metrics."""
from headtraj.metrics.alignment import RigidAlignment, procrustes_align
from headtraj.metrics.motion import (
    SEGMENT_FRAMES,
    SegmentError,
    accel_error,
    camera_space_joints,
    foot_sliding,
    jitter,
    mpjpe,
    pa_mpjpe,
    rte,
    segment_bounds,
    segment_errors,
    wa_w_mpjpe_100,
)
from headtraj.metrics.report import METRIC_KEYS, Evaluation, MetricsReport, evaluate_scenes, evaluate_sequences

__all__ = [
    "RigidAlignment", "procrustes_align",
    "SEGMENT_FRAMES", "SegmentError", "accel_error", "camera_space_joints",
    "foot_sliding", "jitter", "mpjpe", "pa_mpjpe", "rte",
    "segment_bounds", "segment_errors", "wa_w_mpjpe_100",
    "METRIC_KEYS", "Evaluation", "MetricsReport", "evaluate_scenes", "evaluate_sequences",
]
