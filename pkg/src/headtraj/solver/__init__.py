"""Fit roll-pitch factors and local velocities by minimizing the trajectory losses."""
from headtraj.solver.objective import (
    SolverState,
    TrajectoryObjective,
    angles_from_rp,
    objective,
    parameter_count,
    rp_from_angles,
)
from headtraj.solver.optimizer import FitResult, finite_difference_gradient, fit, state_to_observations

__all__ = [
    "SolverState", "TrajectoryObjective", "angles_from_rp", "objective", "parameter_count",
    "rp_from_angles", "FitResult", "finite_difference_gradient", "fit", "state_to_observations",
]
