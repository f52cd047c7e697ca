"""headtraj CLI.

Exit codes: 0 success, 1 selftest failure, 2 input error, 3 solver failure.
"""

from __future__ import annotations

import functools
import logging
from typing import Any, Callable

import click
import numpy as np
from pydantic import ValidationError

from headtraj import __version__
from headtraj.config import (
    PATH_KINDS,
    RIG_KINDS,
    LossWeights,
    NoiseModel,
    SceneConfig,
    SolverConfig,
    preset_names,
)
from headtraj.exceptions import ConfigError, FileFormatError, PreconditionError, SolverError
from headtraj.heading.decomposition import decompose_sequence
from headtraj.io.files import (
    load_model,
    load_observations,
    load_scene,
    save_decomposition,
    save_fit,
    save_fit_report,
    save_observations,
    save_report,
    save_scene,
    save_segments_csv,
)
from headtraj.metrics.motion import segment_errors
from headtraj.metrics.report import evaluate_scenes
from headtraj.selftest import iter_selftest
from headtraj.simulator.noise import perturb as perturb_scene
from headtraj.simulator.scene import generate_scene
from headtraj.solver.optimizer import fit as fit_observations
from headtraj.solver.optimizer import state_to_observations
from headtraj.trajectory.reconstruction import reconstruct_from_observations
from headtraj.types import Observations, Scene
from headtraj.utils import configure_logging

logger = logging.getLogger(__name__)

EXIT_SELFTEST_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_SOLVER_ERROR = 3


def _fail(message: str, code: int) -> None:
    logger.debug("exiting with %d: %s", code, message)
    click.echo(f"error: {message}", err=True)
    click.get_current_context().exit(code)


def _handle_errors(fn: Callable[..., Any]) -> Callable[..., Any]:
    """Map library exceptions onto the exit-code contract."""

    @functools.wraps(fn)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return fn(*args, **kwargs)
        except SolverError as exc:
            _fail(str(exc), EXIT_SOLVER_ERROR)
        except (FileFormatError, PreconditionError, ConfigError, ValidationError) as exc:
            _fail(str(exc), EXIT_INPUT_ERROR)

    return wrapper


def _meta(**extra: Any) -> dict[str, Any]:
    return {"tool": "headtraj", "version": __version__, **extra}


def _reconstructed_scene(obs: Observations) -> Scene:
    human, camera = reconstruct_from_observations(obs)
    return Scene(camera=camera, human=human)


@click.group()
@click.option("--verbose", "-v", count=True, help="Log more (-v info, -vv debug)")
@click.version_option(__version__, prog_name="headtraj")
def main(verbose: int) -> None:
    """headtraj: heading decomposition and world-frame trajectory reconstruction."""
    configure_logging(verbose)


@main.command()
@click.option("--preset", type=click.Choice(preset_names()), default=None, help="<path>-<rig> preset")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None, help="SceneConfig JSON")
@click.option("--path", "path_kind", type=click.Choice(PATH_KINDS), default=None, help="Human path")
@click.option("--rig", "rig_kind", type=click.Choice(RIG_KINDS), default=None, help="Camera rig")
@click.option("--speed", type=float, default=None, help="Walking speed (m/s)")
@click.option("--radius", type=float, default=None, help="Path radius (m)")
@click.option("--step-length", type=float, default=None, help="Gait step length (m)")
@click.option("--cadence", type=float, default=None, help="Gait cadence (steps/s)")
@click.option("--rig-radius", type=float, default=None, help="Orbit and static rig radius (m)")
@click.option("--rig-height", type=float, default=None, help="Camera height above the ground (m)")
@click.option("--angular-rate", type=float, default=None, help="Orbit angular rate (rad/s)")
@click.option("--follow-distance", type=float, default=None, help="Follow rig distance behind the human (m)")
@click.option("--frames", type=int, default=None, help="Number of frames")
@click.option("--fps", type=float, default=None, help="Frame rate")
@click.option("--seed", type=int, default=0, show_default=True, help="Random seed")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True, help="Output scene JSON")
@_handle_errors
def simulate(
    preset: str | None,
    config_path: str | None,
    path_kind: str | None,
    rig_kind: str | None,
    speed: float | None,
    radius: float | None,
    step_length: float | None,
    cadence: float | None,
    rig_radius: float | None,
    rig_height: float | None,
    angular_rate: float | None,
    follow_distance: float | None,
    frames: int | None,
    fps: float | None,
    seed: int,
    out_path: str,
) -> None:
    """Generate a synthetic ground-truth scene."""
    if config_path:
        cfg = load_model(config_path, SceneConfig)
    elif preset:
        cfg = SceneConfig.from_preset(preset)
    else:
        cfg = SceneConfig()
    data = cfg.model_dump()
    for key, value in (("frames", frames), ("fps", fps)):
        if value is not None:
            data[key] = value
    for key, value in (("kind", path_kind), ("speed", speed), ("radius", radius)):
        if value is not None:
            data["path"][key] = value
    for key, value in (("step_length", step_length), ("cadence", cadence)):
        if value is not None:
            data["gait"][key] = value
    rig_overrides = (
        ("kind", rig_kind),
        ("radius", rig_radius),
        ("height", rig_height),
        ("angular_rate", angular_rate),
        ("distance", follow_distance),
    )
    for key, value in rig_overrides:
        if value is not None:
            data["rig"][key] = value
    cfg = SceneConfig.model_validate(data)
    scene = generate_scene(cfg, seed)
    save_scene(out_path, scene, _meta(seed=seed, config=cfg.model_dump()))
    click.echo(f"Wrote {scene.frames}-frame {cfg.path.kind}/{cfg.rig.kind} scene to {out_path}")


@main.command()
@click.option("--in", "in_path", type=click.Path(dir_okay=False), required=True, help="Scene JSON")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True, help="Output observations JSON")
@click.option("--rp-noise", type=float, default=0.0, show_default=True, help="Roll-pitch noise std (rad)")
@click.option("--vel-noise", type=float, default=0.0, show_default=True, help="Velocity noise std (m/frame)")
@click.option("--ang-vel-noise", type=float, default=0.0, show_default=True, help="Angular velocity noise std (rad)")
@click.option("--hc-noise", type=float, default=0.0, show_default=True, help="Camera-space orientation noise std (rad)")
@click.option("--seed", type=int, default=0, show_default=True, help="Random seed")
@click.option("--no-anchor", is_flag=True, help="Omit the ground-truth frame-0 anchor")
@_handle_errors
def perturb(
    in_path: str,
    out_path: str,
    rp_noise: float,
    vel_noise: float,
    ang_vel_noise: float,
    hc_noise: float,
    seed: int,
    no_anchor: bool,
) -> None:
    """Derive (noisy) estimator observations from a scene."""
    noise = NoiseModel(
        rp_noise_rad=rp_noise,
        vel_noise_mpf=vel_noise,
        ang_vel_noise_rad=ang_vel_noise,
        hc_noise_rad=hc_noise,
        seed=seed,
    )
    obs = perturb_scene(load_scene(in_path), noise)
    if no_anchor:
        obs = obs.replace(anchor=None)
    save_observations(out_path, obs, _meta(input=in_path, noise=noise.model_dump()))
    click.echo(f"Wrote {obs.frames}-frame observations to {out_path}")


@main.command()
@click.option("--in", "in_path", type=click.Path(dir_okay=False), required=True, help="Scene JSON")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True, help="Output decomposition JSON")
@_handle_errors
def decompose(in_path: str, out_path: str) -> None:
    """Split camera orientations into heading and roll-pitch."""
    scene = load_scene(in_path)
    seq = decompose_sequence(scene.camera.rotations)
    residual = float(np.max(np.linalg.norm(seq.yaw @ seq.rp - scene.camera.rotations, axis=(1, 2))))
    save_decomposition(out_path, seq, residual, source=in_path)
    click.echo(f"Max reconstruction residual: {residual:.3e}")


@main.command()
@click.option("--obs", "obs_path", type=click.Path(dir_okay=False), required=True, help="Observations JSON")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True, help="Output scene JSON")
@click.option("--identity-initial-yaw", is_flag=True, help="Start from identity heading even if anchored")
@_handle_errors
def reconstruct(obs_path: str, out_path: str, identity_initial_yaw: bool) -> None:
    """Rebuild world-space camera and human motion from observations."""
    obs = load_observations(obs_path)
    human, camera = reconstruct_from_observations(obs, identity_initial_yaw=identity_initial_yaw)
    anchored = obs.anchor is not None and not identity_initial_yaw
    save_scene(out_path, Scene(camera=camera, human=human), _meta(input=obs_path, anchored=anchored))
    click.echo(f"Wrote reconstructed {human.frames}-frame scene to {out_path}")


@main.command()
@click.option("--pred", "pred_path", type=click.Path(dir_okay=False), required=True, help="Predicted scene JSON")
@click.option("--gt", "gt_path", type=click.Path(dir_okay=False), required=True, help="Ground-truth scene JSON")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True, help="Output report JSON")
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None, help="Per-segment CSV")
@_handle_errors
def evaluate(pred_path: str, gt_path: str, out_path: str, csv_path: str | None) -> None:
    """Compute the metric suite of a prediction against ground truth."""
    pred, gt = load_scene(pred_path), load_scene(gt_path)
    evaluation = evaluate_scenes(pred, gt)
    save_report(out_path, evaluation, _meta(pred=pred_path, gt=gt_path))
    if csv_path:
        rows = segment_errors(pred.human, gt.human) if gt.human.joints is not None else []
        save_segments_csv(csv_path, rows)
    for key, value in evaluation.report.to_json_dict().items():
        click.echo(f"  {key:<18} {value:.6g}")
    for key, reason in sorted(evaluation.omitted.items()):
        click.echo(f"  {key:<18} omitted ({reason})")


@main.command()
@click.option("--obs", "obs_path", type=click.Path(dir_okay=False), required=True, help="Observations JSON")
@click.option("--supervision", "sup_path", type=click.Path(dir_okay=False), required=True, help="Ground-truth scene JSON")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None, help="SolverConfig JSON")
@click.option("--lambda-h", type=float, default=None, help="Human trajectory loss weight")
@click.option("--lambda-cam", type=float, default=None, help="Camera trajectory loss weight")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True, help="Output fit JSON")
@click.option("--report", "report_path", type=click.Path(dir_okay=False), default=None, help="Before/after report JSON")
@_handle_errors
def fit(
    obs_path: str,
    sup_path: str,
    config_path: str | None,
    lambda_h: float | None,
    lambda_cam: float | None,
    out_path: str,
    report_path: str | None,
) -> None:
    """Refine observations by minimizing the trajectory losses against supervision."""
    cfg = load_model(config_path, SolverConfig) if config_path else SolverConfig()
    weights = LossWeights(**{
        k: v for k, v in (("lambda_h", lambda_h), ("lambda_cam", lambda_cam)) if v is not None
    })
    obs, supervision = load_observations(obs_path), load_scene(sup_path)
    if obs.frames > cfg.max_frames:
        _fail(f"{obs.frames} frames exceeds the solver limit of {cfg.max_frames}", EXIT_INPUT_ERROR)
    result = fit_observations(obs, supervision, cfg, weights)
    fitted = state_to_observations(result.state, obs)
    meta = _meta(obs=obs_path, supervision=sup_path, solver=cfg.model_dump(), weights=weights.model_dump())
    save_fit(out_path, fitted, result, meta)
    if report_path:
        before = evaluate_scenes(_reconstructed_scene(obs), supervision)
        after = evaluate_scenes(_reconstructed_scene(fitted), supervision)
        save_fit_report(report_path, before, after, meta)
    click.echo(
        f"{result.termination} after {result.iterations} iterations: "
        f"loss {result.initial_loss:.6g} -> {result.final_loss:.6g}"
    )


@main.command()
def selftest() -> None:
    """Run the built-in invariant suite."""
    failed = 0
    total = 0
    for result in iter_selftest():
        total += 1
        if result.passed:
            click.echo(f"PASS  {result.name}")
        else:
            failed += 1
            click.echo(f"FAIL  {result.name}: {result.detail}")
    click.echo(f"{total - failed}/{total} properties passed")
    if failed:
        click.get_current_context().exit(EXIT_SELFTEST_FAILED)
