"""Yaw / roll-pitch factorization, heading angular velocity and heading integration."""
from headtraj.heading.decomposition import (
    PURE_YAW_TOL,
    REPROJECT_INTERVAL,
    HeadingDecomp,
    HeadingSequence,
    compose_world_orientation,
    decompose_heading,
    decompose_sequence,
    heading_angular_velocities,
    heading_angular_velocity,
    integrate_heading,
    integrate_heading_angles,
    project_to_yaw,
    yaw_factor,
    yaw_impurity,
)

__all__ = [
    "PURE_YAW_TOL", "REPROJECT_INTERVAL",
    "HeadingDecomp", "HeadingSequence",
    "compose_world_orientation", "decompose_heading", "decompose_sequence",
    "heading_angular_velocities", "heading_angular_velocity",
    "integrate_heading", "integrate_heading_angles",
    "project_to_yaw", "yaw_factor", "yaw_impurity",
]
