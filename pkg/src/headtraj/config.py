"""headtraj configuration."""

from __future__ import annotations

import os
from typing import Literal

from pydantic import BaseModel, Field, model_validator

from headtraj.exceptions import ConfigError

EPSILON_ENV = "HEADTRAJ_EPSILON"

PathKind = Literal["line", "circle", "figure-eight", "stationary"]
RigKind = Literal["static", "orbit", "follow", "handheld"]

PATH_KINDS: tuple[str, ...] = ("line", "circle", "figure-eight", "stationary")
RIG_KINDS: tuple[str, ...] = ("static", "orbit", "follow", "handheld")


def _default_epsilon() -> float:
    raw = os.environ.get(EPSILON_ENV)
    if raw is None or raw == "":
        return 1e-6
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{EPSILON_ENV} is not a number: {raw!r}") from exc


class HeadingConfig(BaseModel):
    """Threshold on the horizontal projection of the forward axis."""

    model_config = {"frozen": True}

    epsilon: float = Field(default_factory=_default_epsilon, gt=0, validate_default=True)


class LossWeights(BaseModel):
    model_config = {"frozen": True}

    lambda_h: float = Field(default=1.0, ge=0)
    lambda_cam: float = Field(default=1.0, ge=0)
    lambda_static: float = Field(default=1.0, ge=0)
    # Camera-space reconstruction weights. Recorded for completeness; the
    # image-space losses they scale are not computed here.
    cr_j3d: float = Field(default=500.0, ge=0)
    cr_verts: float = Field(default=500.0, ge=0)
    j2d: float = Field(default=1000.0, ge=0)
    verts2d: float = Field(default=1000.0, ge=0)
    transl_c: float = Field(default=1.0, ge=0)


class PathConfig(BaseModel):
    kind: PathKind = "circle"
    # None means step_length * cadence
    speed: float | None = Field(default=None, gt=0)
    radius: float = Field(default=3.0, gt=0)


class RigConfig(BaseModel):
    kind: RigKind = "orbit"
    radius: float = Field(default=6.0, gt=0)
    height: float = Field(default=1.7, gt=0)
    angular_rate: float = Field(default=0.25, gt=0)
    distance: float = Field(default=3.5, gt=0)
    handheld_amplitude: float = Field(default=0.03, ge=0)
    handheld_frequency: float = Field(default=1.3, gt=0)


class GaitConfig(BaseModel):
    step_length: float = Field(default=0.7, gt=0)
    cadence: float = Field(default=1.8, gt=0)
    foot_width: float = Field(default=0.1, gt=0)
    lift_height: float = Field(default=0.08, gt=0)
    root_height: float = Field(default=0.9, gt=0)


class SceneConfig(BaseModel):
    frames: int = Field(default=120, ge=2)
    fps: float = Field(default=30.0, gt=0)
    path: PathConfig = Field(default_factory=PathConfig)
    rig: RigConfig = Field(default_factory=RigConfig)
    gait: GaitConfig = Field(default_factory=GaitConfig)

    @model_validator(mode="after")
    def _check_gait_resolution(self) -> "SceneConfig":
        if self.step_frames < 2:
            raise ValueError(
                f"cadence {self.gait.cadence} steps/s is too fast for {self.fps} fps "
                "(a step must span at least 2 frames)"
            )
        if self.path.kind == "circle" and self.path.radius <= 2 * self.gait.foot_width:
            raise ValueError("circle radius must exceed twice the foot width")
        if self.rig.kind in ("orbit", "static") and self.rig.radius <= self.path.radius and self.path.kind != "line":
            raise ValueError("camera rig radius must enclose the human path")
        return self

    @property
    def root_speed(self) -> float:
        if self.path.kind == "stationary":
            return 0.0
        if self.path.speed is not None:
            return self.path.speed
        return self.gait.step_length * self.gait.cadence

    @property
    def step_frames(self) -> int:
        """Frames per step; stance and swing each last one step."""
        return int(round(self.fps / self.gait.cadence))

    @classmethod
    def from_preset(cls, name: str, frames: int = 120, fps: float = 30.0) -> "SceneConfig":
        """Build a config from a ``<path>-<rig>`` preset name, e.g. ``figure-eight-orbit``."""
        path_kind, _, rig_kind = name.rpartition("-")
        if path_kind not in PATH_KINDS or rig_kind not in RIG_KINDS:
            raise ConfigError(
                f"unknown preset {name!r}; expected <path>-<rig> with path in {PATH_KINDS} "
                f"and rig in {RIG_KINDS}"
            )
        return cls(
            frames=frames,
            fps=fps,
            path=PathConfig(kind=path_kind),  # type: ignore[arg-type]
            rig=RigConfig(kind=rig_kind),  # type: ignore[arg-type]
        )


def preset_names() -> list[str]:
    return [f"{p}-{r}" for p in PATH_KINDS for r in RIG_KINDS]


class NoiseModel(BaseModel):
    """Per-channel noise injected into simulated observations."""

    model_config = {"frozen": True}

    rp_noise_rad: float = Field(default=0.0, ge=0)
    vel_noise_mpf: float = Field(default=0.0, ge=0)
    ang_vel_noise_rad: float = Field(default=0.0, ge=0)
    hc_noise_rad: float = Field(default=0.0, ge=0)
    seed: int = 0


class SolverConfig(BaseModel):
    max_iters: int = Field(default=200, ge=0)
    step_init: float = Field(default=1e-2, gt=0)
    fd_step: float = Field(default=1e-5, gt=0)
    tol: float = Field(default=1e-8, gt=0)
    data_weight: float = Field(default=0.1, ge=0)
    loss_floor: float = Field(default=1e-10, ge=0)
    max_halvings: int = Field(default=20, ge=1)
    max_frames: int = Field(default=512, ge=2)
