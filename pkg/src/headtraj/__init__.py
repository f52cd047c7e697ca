"""headtraj: heading decomposition and world-frame camera/human trajectory reconstruction."""

__version__ = "0.1.0"

from headtraj.config import HeadingConfig, LossWeights, NoiseModel, SceneConfig, SolverConfig
from headtraj.exceptions import HeadTrajError
from headtraj.heading import decompose_heading, decompose_sequence, heading_angular_velocity, integrate_heading
from headtraj.metrics import MetricsReport, evaluate_scenes, evaluate_sequences
from headtraj.simulator import generate_scene, perturb
from headtraj.solver import fit
from headtraj.trajectory import (
    differentiate_trajectory,
    integrate_trajectory,
    reconstruct_from_observations,
    reconstruct_world_motion,
)
from headtraj.types import Anchor, MotionSequence, Observations, Scene

__all__ = [
    "__version__",
    "HeadingConfig", "LossWeights", "NoiseModel", "SceneConfig", "SolverConfig",
    "HeadTrajError",
    "decompose_heading", "decompose_sequence", "heading_angular_velocity", "integrate_heading",
    "MetricsReport", "evaluate_scenes", "evaluate_sequences",
    "generate_scene", "perturb", "fit",
    "differentiate_trajectory", "integrate_trajectory",
    "reconstruct_from_observations", "reconstruct_world_motion",
    "Anchor", "MotionSequence", "Observations", "Scene",
]
