"""Rotation algebra under the fixed y-down / z-forward convention."""
from headtraj.geometry.so3 import (
    CONVENTION,
    E_X,
    E_Y,
    E_Z,
    FORWARD_AXIS,
    GRAVITY_AXIS,
    batch_yaw_rotation,
    body_angular_velocities,
    body_angular_velocity,
    body_to_world_velocity,
    from_axis_angle,
    geodesic_distance,
    is_rotation,
    orthonormalize,
    random_rotations,
    small_random_rotations,
    validate_rotation,
    validate_rotations,
    world_angular_velocity,
    yaw_angle,
    yaw_rotation,
)

__all__ = [
    "CONVENTION", "E_X", "E_Y", "E_Z", "FORWARD_AXIS", "GRAVITY_AXIS",
    "batch_yaw_rotation", "body_angular_velocities", "body_angular_velocity",
    "body_to_world_velocity", "from_axis_angle", "geodesic_distance",
    "is_rotation", "orthonormalize", "random_rotations", "small_random_rotations",
    "validate_rotation", "validate_rotations", "world_angular_velocity",
    "yaw_angle", "yaw_rotation",
]
