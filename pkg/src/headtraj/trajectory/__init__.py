"""World-frame trajectory integration and joint camera/human reconstruction."""
from headtraj.trajectory.integration import differentiate_trajectory, integrate_trajectory
from headtraj.trajectory.reconstruction import reconstruct_from_observations, reconstruct_world_motion

__all__ = [
    "differentiate_trajectory", "integrate_trajectory",
    "reconstruct_from_observations", "reconstruct_world_motion",
]
