"""Training-objective components computable without a body model."""
from headtraj.losses.contact import (
    CONTACT_SPEED_MPS,
    foot_velocities,
    generate_contact_labels,
    static_contact_loss,
)
from headtraj.losses.trajectory_losses import (
    PredictionVector,
    TrajectoryBranches,
    simple_loss,
    teacher_forcing_traj_loss,
    total_loss,
    trajectory_branches,
)

__all__ = [
    "CONTACT_SPEED_MPS", "foot_velocities", "generate_contact_labels", "static_contact_loss",
    "PredictionVector", "TrajectoryBranches", "simple_loss",
    "teacher_forcing_traj_loss", "total_loss", "trajectory_branches",
]
