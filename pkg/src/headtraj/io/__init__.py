"""On-disk JSON formats."""
from headtraj.io.files import (
    FORMAT_VERSION,
    load_model,
    load_observations,
    load_scene,
    observations_from_dict,
    observations_to_dict,
    save_decomposition,
    save_fit,
    save_fit_report,
    save_observations,
    save_report,
    save_scene,
    save_segments_csv,
    scene_to_dict,
)

__all__ = [
    "FORMAT_VERSION", "load_model", "load_observations", "load_scene",
    "observations_from_dict", "observations_to_dict", "save_decomposition", "save_fit", "save_fit_report",
    "save_observations", "save_report", "save_scene", "save_segments_csv", "scene_to_dict",
]
