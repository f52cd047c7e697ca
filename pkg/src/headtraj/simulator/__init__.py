"""Synthetic ground-truth scenes and noisy observations."""
from headtraj.simulator.noise import perturb, strip_yaw
from headtraj.simulator.scene import generate_scene, look_at, make_rng, path_center, root_path, stance_mask

__all__ = [
    "generate_scene", "look_at", "make_rng", "path_center", "perturb",
    "root_path", "stance_mask", "strip_yaw",
]
