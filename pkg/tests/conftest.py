from __future__ import annotations

import numpy as np
import pytest

from headtraj.config import NoiseModel, SceneConfig
from headtraj.io import save_scene
from headtraj.selftest import sample_rotations, smooth_sequence
from headtraj.simulator import generate_scene, perturb
from headtraj.types import Observations, Scene


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(12345))


@pytest.fixture
def rotations(rng) -> np.ndarray:
    """500 uniform rotations kept away from the gravity-axis singularity."""
    return sample_rotations(500, rng)


@pytest.fixture
def camera_track(rng) -> np.ndarray:
    return smooth_sequence(120, rng)


# ---------- simulated scenes ----------

@pytest.fixture(scope="session")
def circle_scene() -> Scene:
    return generate_scene(SceneConfig.from_preset("circle-orbit", frames=60), seed=7)


@pytest.fixture(scope="session")
def follow_scene() -> Scene:
    return generate_scene(SceneConfig.from_preset("figure-eight-follow", frames=120), seed=3)


@pytest.fixture(scope="session")
def circle_obs(circle_scene) -> Observations:
    return perturb(circle_scene, NoiseModel())


@pytest.fixture
def tmp_scene(tmp_path, circle_scene):
    return save_scene(tmp_path / "scene.json", circle_scene)

