"""Built-in invariant suite behind ``headtraj selftest``.

Every module property runs here on a fixed seed at reduced sample counts
and reports a deterministic one-line verdict. A property that raises counts
as failed, so a broken environment (for example an invalid HEADTRAJ_EPSILON)
fails the suite instead of crashing it.
"""

from __future__ import annotations

import logging
from typing import Callable, Iterator, NamedTuple

import numpy as np

from headtraj.config import NoiseModel, SceneConfig, SolverConfig, preset_names
from headtraj.geometry.so3 import (
    E_X,
    E_Y,
    batch_rot_x,
    body_angular_velocity,
    body_to_world_velocity,
    from_axis_angle,
    geodesic_distance,
    orthonormalize,
    random_rotations,
    small_random_rotations,
    world_angular_velocity,
    yaw_rotation,
)
from headtraj.heading.decomposition import decompose_heading, decompose_sequence, heading_angular_velocity, yaw_factor
from headtraj.losses.contact import generate_contact_labels
from headtraj.losses.trajectory_losses import teacher_forcing_traj_loss
from headtraj.metrics.motion import (
    accel_error,
    foot_sliding,
    jitter,
    rte,
    segment_bounds,
    segment_errors,
    wa_w_mpjpe_100,
)
from headtraj.metrics.report import evaluate_scenes
from headtraj.simulator.noise import perturb
from headtraj.simulator.scene import generate_scene, stance_mask
from headtraj.solver.objective import SolverState, TrajectoryObjective, objective
from headtraj.solver.optimizer import finite_difference_gradient, fit
from headtraj.trajectory.integration import differentiate_trajectory, integrate_trajectory
from headtraj.trajectory.reconstruction import reconstruct_from_observations, reconstruct_world_motion
from headtraj.types import MotionSequence, Observations, Scene

logger = logging.getLogger(__name__)

SEED = 20240607
PITCH_MARGIN = 0.05
FOLLOW_CONE_RAD = 0.2


class PropertyResult(NamedTuple):
    name: str
    passed: bool
    detail: str


_PROPERTIES: list[tuple[str, Callable[[np.random.Generator], str | None]]] = []


def _property(name: str) -> Callable[[Callable[[np.random.Generator], str | None]], Callable]:
    def register(fn: Callable[[np.random.Generator], str | None]) -> Callable:
        _PROPERTIES.append((name, fn))
        return fn

    return register


def property_names() -> list[str]:
    return [name for name, _ in _PROPERTIES]


def sample_rotations(n: int, rng: np.random.Generator, margin: float = PITCH_MARGIN) -> np.ndarray:
    """Uniform rotations whose forward axis stays ``margin`` away from the gravity axis."""
    out: list[np.ndarray] = []
    limit = np.cos(margin)
    while sum(len(o) for o in out) < n:
        R = random_rotations(n, rng)
        out.append(R[np.abs(R[:, 1, 2]) < limit])
    return np.concatenate(out)[:n]


def smooth_sequence(T: int, rng: np.random.Generator, step_std: float = 0.05) -> np.ndarray:
    """Camera-like orientation track: a random start followed by small body-frame increments."""
    R = np.empty((T, 3, 3))
    R[0] = sample_rotations(1, rng, margin=0.5)[0]
    steps = small_random_rotations(T - 1, step_std, rng)
    for t in range(T - 1):
        R[t + 1] = R[t] @ steps[t]
    return R


def _fmt(x: float) -> str:
    return f"{x:.3e}"


def _max_err(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def _scene(preset: str = "circle-orbit", frames: int = 120) -> Scene:
    return generate_scene(SceneConfig.from_preset(preset, frames=frames), seed=SEED)


# ---------- so3 ----------

@_property("orthonormalize fixes rotations")
def _orthonormalize_fixed_point(rng: np.random.Generator) -> str | None:
    worst = max(_max_err(orthonormalize(R), R) for R in random_rotations(200, rng))
    return None if worst < 1e-12 else f"max deviation {_fmt(worst)}"


@_property("body/world angular velocity conjugation")
def _angular_velocity_conjugation(rng: np.random.Generator) -> str | None:
    A, B = random_rotations(500, rng), random_rotations(500, rng)
    worst = max(
        _max_err(body_to_world_velocity(body_angular_velocity(a, b), a), world_angular_velocity(a, b))
        for a, b in zip(A, B)
    )
    return None if worst < 1e-12 else f"max deviation {_fmt(worst)}"


@_property("geodesic distance is a metric")
def _geodesic_metric(rng: np.random.Generator) -> str | None:
    A, B, C = (random_rotations(200, rng) for _ in range(3))
    asym = max(abs(geodesic_distance(a, b) - geodesic_distance(b, a)) for a, b in zip(A, B))
    excess = max(
        geodesic_distance(a, c) - geodesic_distance(a, b) - geodesic_distance(b, c) for a, b, c in zip(A, B, C)
    )
    if asym >= 1e-9 or excess >= 1e-9:
        return f"asymmetry {_fmt(asym)}, triangle excess {_fmt(excess)}"
    return None


@_property("same-axis rotations compose by adding angles")
def _same_axis(rng: np.random.Generator) -> str | None:
    axes = rng.normal(size=(200, 3))
    axes /= np.linalg.norm(axes, axis=1, keepdims=True)
    angles = rng.uniform(-np.pi, np.pi, size=(200, 2))
    worst = max(
        _max_err(from_axis_angle(a, th) @ from_axis_angle(a, ph), from_axis_angle(a, th + ph))
        for a, (th, ph) in zip(axes, angles)
    )
    return None if worst < 1e-10 else f"max deviation {_fmt(worst)}"


# ---------- heading ----------

@_property("decomposition round trip")
def _decomposition_round_trip(rng: np.random.Generator) -> str | None:
    R = sample_rotations(2000, rng)
    yaw = yaw_factor(R)
    rp = np.einsum("nji,njk->nik", yaw, R)
    err = float(np.max(np.linalg.norm(yaw @ rp - R, axis=(1, 2))))
    axis = float(np.max(np.abs(yaw @ E_Y - E_Y)))
    rp_yaw = max(_max_err(decompose_heading(r).yaw, np.eye(3)) for r in rp[:200])
    if err >= 1e-9 or axis >= 1e-9 or rp_yaw >= 1e-9:
        return f"reconstruction {_fmt(err)}, gravity axis {_fmt(axis)}, yaw of rp {_fmt(rp_yaw)}"
    return None


@_property("heading angular velocity conjugation")
def _conjugation(rng: np.random.Generator) -> str | None:
    worst = 0.0
    for _ in range(10):
        R = smooth_sequence(120, rng)
        seq, yaw = decompose_sequence(R), yaw_factor(R)
        expected = np.einsum("tji,tjk->tik", yaw[:-1], yaw[1:])
        worst = max(worst, _max_err(seq.dyaw, expected))
    return None if worst < 1e-9 else f"max deviation {_fmt(worst)}"


@_property("still camera has no heading change")
def _still_camera(rng: np.random.Generator) -> str | None:
    R = sample_rotations(200, rng)
    rp = np.einsum("nji,njk->nik", yaw_factor(R), R)
    worst = max(_max_err(heading_angular_velocity(np.eye(3), r, r), np.eye(3)) for r in rp)
    return None if worst < 1e-12 else f"max deviation {_fmt(worst)}"


@_property("heading invariance")
def _heading_invariance(rng: np.random.Generator) -> str | None:
    R = smooth_sequence(120, rng)
    G = yaw_rotation(float(rng.uniform(-np.pi, np.pi)))
    a, b = decompose_sequence(R), decompose_sequence(G @ R)
    rp_dev, dyaw_dev, yaw_dev = _max_err(a.rp, b.rp), _max_err(a.dyaw, b.dyaw), _max_err(G @ a.yaw, b.yaw)
    worst = max(rp_dev, dyaw_dev, yaw_dev)
    return None if worst < 1e-9 else f"rp {_fmt(rp_dev)}, dyaw {_fmt(dyaw_dev)}, yaw {_fmt(yaw_dev)}"


@_property("continuity through near-vertical pitch")
def _degenerate_sweep(rng: np.random.Generator) -> str | None:
    limit = np.pi / 2 - 1e-4
    pitch = np.concatenate([np.linspace(-limit, limit, 60), np.linspace(limit, -limit, 60)])
    R = yaw_rotation(float(rng.uniform(-np.pi, np.pi))) @ batch_rot_x(pitch)
    seq = decompose_sequence(R)
    worst = 0.0
    for stack in (seq.rp, seq.yaw, seq.dyaw):
        if not np.all(np.isfinite(stack)):
            return "non-finite output"
        gram = np.einsum("nji,njk->nik", stack, stack)
        worst = max(worst, _max_err(gram, np.eye(3)))
    return None if worst < 1e-6 else f"orthonormality error {_fmt(worst)}"


# ---------- trajectory ----------

@_property("integrate/differentiate inverse pair")
def _inverse_pair(rng: np.random.Generator) -> str | None:
    R = random_rotations(100 * 50, rng).reshape(100, 50, 3, 3)
    v = rng.normal(0.0, 0.05, size=(100, 49, 3))
    t0 = rng.normal(size=(100, 3))
    p = integrate_trajectory(t0, R, v)
    v_back = differentiate_trajectory(p, R)
    p_back = integrate_trajectory(p[:, 0], R, v_back)
    worst = max(_max_err(v_back, v), _max_err(p_back, p))
    return None if worst < 1e-12 else f"max deviation {_fmt(worst)}"


@_property("integration is rotation equivariant")
def _integration_equivariance(rng: np.random.Generator) -> str | None:
    R = random_rotations(50, rng)
    v = rng.normal(0.0, 0.05, size=(49, 3))
    t0 = rng.normal(size=3)
    G = random_rotations(1, rng)[0]
    worst = _max_err(integrate_trajectory(G @ t0, G @ R, v), integrate_trajectory(t0, R, v) @ G.T)
    return None if worst < 1e-12 else f"max deviation {_fmt(worst)}"


@_property("initial heading only yaws the reconstruction")
def _initial_heading(rng: np.random.Generator) -> str | None:
    obs = perturb(_scene(frames=60), NoiseModel())
    G = yaw_rotation(float(rng.uniform(-np.pi, np.pi)))
    args = (obs.body_angular_velocity, obs.camera_local_velocity, obs.rp, obs.hc_rotations, obs.human_local_velocity)
    h_a, c_a = reconstruct_world_motion(*args)
    h_b, c_b = reconstruct_world_motion(*args, yaw0=G)
    worst = max(_max_err(h_b.positions, h_a.positions @ G.T), _max_err(c_b.positions, c_a.positions @ G.T))
    return None if worst < 1e-9 else f"max deviation {_fmt(worst)}"


@_property("noiseless end-to-end round trip")
def _round_trip(rng: np.random.Generator) -> str | None:
    failures = []
    for path in ("line", "circle", "figure-eight"):
        for rig in ("static", "orbit", "follow", "handheld"):
            scene = _scene(f"{path}-{rig}")
            human, camera = reconstruct_from_observations(perturb(scene, NoiseModel()), identity_initial_yaw=True)
            report = evaluate_scenes(Scene(camera=camera, human=human), scene).report
            if not (report.wa_mpjpe_100 < 1e-3 and report.rte < 1e-6):
                failures.append(f"{path}-{rig}: wa={_fmt(report.wa_mpjpe_100)} rte={_fmt(report.rte)}")
    return "; ".join(failures) or None


# ---------- losses ----------

@_property("teacher-forcing closed form")
def _teacher_forcing(rng: np.random.Generator) -> str | None:
    T, b = 50, 0.01
    R = np.broadcast_to(np.eye(3), (T, 3, 3))
    v_gt = np.tile([0.0, 0.0, 0.05], (T - 1, 1))
    t_gt = integrate_trajectory(np.zeros(3), R, v_gt)
    loss = teacher_forcing_traj_loss(v_gt + [0.0, 0.0, b], R, v_gt, R, t_gt, normalize=False)
    expected = b * T * (T - 1) / 2
    return None if abs(loss - expected) < 1e-9 else f"{loss!r} != {expected!r}"


@_property("teacher-forcing loss ignores a global rigid transform")
def _teacher_forcing_rigid(rng: np.random.Generator) -> str | None:
    R_gt = smooth_sequence(40, rng)
    R_pred = R_gt @ small_random_rotations(40, 0.02, rng)
    v_gt = rng.normal(0.0, 0.05, size=(39, 3))
    v_pred = v_gt + rng.normal(0.0, 0.01, size=v_gt.shape)
    t_gt = integrate_trajectory(rng.normal(size=3), R_gt, v_gt)
    G, c = random_rotations(1, rng)[0], rng.normal(size=3)
    before = teacher_forcing_traj_loss(v_pred, R_pred, v_gt, R_gt, t_gt)
    after = teacher_forcing_traj_loss(v_pred, G @ R_pred, v_gt, G @ R_gt, t_gt @ G.T + c)
    return None if abs(after - before) < 1e-9 else f"{after!r} != {before!r}"


@_property("teacher-forcing loss is homogeneous in velocity error")
def _teacher_forcing_homogeneous(rng: np.random.Generator) -> str | None:
    T = 40
    R = np.broadcast_to(np.eye(3), (T, 3, 3))
    v = np.tile([0.0, 0.0, 0.05], (T - 1, 1))
    t = integrate_trajectory(np.zeros(3), R, v)
    err = rng.normal(0.0, 0.005, size=v.shape)
    base = teacher_forcing_traj_loss(v + err, R, v, R, t)
    worst = 0.0
    for c in rng.uniform(0.1, 10.0, size=5):
        scaled = teacher_forcing_traj_loss(v + c * err, R, v, R, t)
        worst = max(worst, abs(scaled - c * base))
    return None if worst < 1e-9 else f"max deviation {_fmt(worst)}"


@_property("contact labels recover stance")
def _contacts(rng: np.random.Generator) -> str | None:
    cfg = SceneConfig.from_preset("circle-follow", frames=120)
    scene = generate_scene(cfg, seed=SEED)
    stance = stance_mask(cfg)
    expected = np.concatenate([stance[:-1] & stance[1:], (stance[-2] & stance[-1])[None]], axis=0)
    labels = generate_contact_labels(scene.human.foot_positions(), cfg.fps)
    mismatched = int(np.sum(labels != expected))
    return None if mismatched == 0 else f"{mismatched} mismatched labels"


@_property("contact labels ignore translation")
def _contacts_translation(rng: np.random.Generator) -> str | None:
    scene = _scene("figure-eight-follow")
    feet = scene.human.foot_positions()
    moved = feet + rng.normal(0.0, 5.0, size=3)
    changed = int(np.sum(generate_contact_labels(feet, scene.fps) != generate_contact_labels(moved, scene.fps)))
    return None if changed == 0 else f"{changed} labels changed"


# ---------- metrics ----------

def _line_sequence(points: np.ndarray) -> MotionSequence:
    T = len(points)
    return MotionSequence(fps=30.0, rotations=np.broadcast_to(np.eye(3), (T, 3, 3)), positions=points[:, 0], joints=points)


def _drifting_joints(T: int) -> tuple[np.ndarray, np.ndarray]:
    base = np.array([[0.0, -0.9, 0.0], [-0.1, 0.0, 0.05], [0.1, 0.0, -0.05]])
    gt = np.broadcast_to(base, (T, 3, 3)).copy()
    return gt + np.arange(T)[:, None, None] * np.array([1e-3, 0.0, 0.0]), gt


@_property("metric oracles")
def _metric_oracles(rng: np.random.Generator) -> str | None:
    drift, gt = _drifting_joints(100)
    wa, w = wa_w_mpjpe_100(_line_sequence(drift), _line_sequence(gt))
    path = np.stack([np.zeros(11), np.zeros(11), np.arange(11.0)], axis=1)
    pred = path.copy()
    pred[-1, 0] += 1.0
    pct = rte(pred, path)
    problems = []
    if abs(w - 49.01) > 1e-6:
        problems.append(f"w_mpjpe {w:.6f} != 49.01")
    if abs(wa - 25.0) > 1e-6:
        problems.append(f"wa_mpjpe {wa:.6f} != 25")
    if abs(pct - 10.0) > 1e-9:
        problems.append(f"rte {pct:.9f} != 10")
    return "; ".join(problems) or None


@_property("metrics of a scene against itself vanish")
def _metrics_on_self(rng: np.random.Generator) -> str | None:
    scene = _scene("figure-eight-handheld")
    evaluation = evaluate_scenes(scene, scene)
    values = evaluation.report.model_dump()
    # jitter describes the prediction alone; against itself it equals the ground truth's
    errors = {k: v for k, v in values.items() if k != "jitter"}
    nonzero = [f"{k}={_fmt(v)}" for k, v in errors.items() if v is None or abs(v) >= 1e-6]
    if values["jitter"] != evaluation.gt_jitter:
        nonzero.append("jitter differs from the ground truth's")
    return "; ".join(nonzero) or None


@_property("WA-MPJPE ignores per-segment rigid transforms")
def _wa_per_segment(rng: np.random.Generator) -> str | None:
    drift, gt = _drifting_joints(250)
    moved = drift.copy()
    for start, end in segment_bounds(len(gt)):
        G, c = random_rotations(1, rng)[0], rng.normal(size=3)
        moved[start:end] = drift[start:end] @ G.T + c
    before = segment_errors(_line_sequence(drift), _line_sequence(gt))
    after = segment_errors(_line_sequence(moved), _line_sequence(gt))
    # mm, so 1e-6 here is 1e-9 m
    worst = max(abs(a.wa_mpjpe_100 - b.wa_mpjpe_100) for a, b in zip(after, before))
    return None if worst < 1e-6 else f"max change {_fmt(worst)} mm"


@_property("RTE ignores a global rigid transform")
def _rte_rigid(rng: np.random.Generator) -> str | None:
    human = _scene().human
    G = from_axis_angle(E_X, float(rng.uniform(-0.5, 0.5))) @ yaw_rotation(float(rng.uniform(-np.pi, np.pi)))
    c = rng.normal(0.0, 2.0, size=3)
    moved = human.positions @ G.T + c
    with_rotations = rte(moved, human.positions, G @ human.rotations, human.rotations)
    without = rte(moved, human.positions)
    if max(with_rotations, without) >= 1e-9:
        return f"with rotations {_fmt(with_rotations)}, without {_fmt(without)}"
    return None


@_property("smoothness metrics ignore rigid motion")
def _smoothness_invariance(rng: np.random.Generator) -> str | None:
    joints = _scene().human.joints
    pred = joints + rng.normal(0.0, 1e-3, size=joints.shape)
    G, c = random_rotations(1, rng)[0], rng.normal(0.0, 2.0, size=3)
    base_jitter, base_accel = jitter(pred, 30.0), accel_error(pred, joints, 30.0)
    jitter_dev = max(abs(jitter(pred @ G.T, 30.0) - base_jitter), abs(jitter(pred + c, 30.0) - base_jitter))
    accel_dev = abs(accel_error(pred + c, joints + c, 30.0) - base_accel)
    if jitter_dev >= 1e-6 * base_jitter or accel_dev >= 1e-6 * base_accel:
        return f"jitter change {_fmt(jitter_dev)}, accel change {_fmt(accel_dev)}"
    return None


@_property("foot sliding ignores vertical motion")
def _foot_sliding_vertical(rng: np.random.Generator) -> str | None:
    human = _scene("line-follow").human
    feet = human.foot_positions() + rng.normal(0.0, 0.01, size=(human.frames, 2, 3))
    bobbing = feet.copy()
    bobbing[..., 1] += rng.normal(0.0, 0.05, size=bobbing.shape[:2])
    change = abs(foot_sliding(bobbing, human.contacts) - foot_sliding(feet, human.contacts))
    return None if change < 1e-9 else f"change {_fmt(change)} mm"


# ---------- simulator ----------

@_property("scenes integrate to their own positions")
def _scene_self_consistency(rng: np.random.Generator) -> str | None:
    failures = []
    for name in preset_names():
        scene = _scene(name, frames=60)
        for label, seq in (("human", scene.human), ("camera", scene.camera)):
            track = integrate_trajectory(seq.positions[0], seq.rotations, seq.local_velocities)
            err = _max_err(track, seq.positions)
            if err >= 1e-9:
                failures.append(f"{name} {label}: {_fmt(err)}")
    return "; ".join(failures) or None


@_property("follow rig keeps the human in view")
def _follow_cone(rng: np.random.Generator) -> str | None:
    failures = []
    for path in ("line", "circle", "figure-eight", "stationary"):
        scene = _scene(f"{path}-follow")
        forward = scene.camera.rotations[:, :, 2]
        to_root = scene.human.positions - scene.camera.positions
        angle = np.arctan2(np.linalg.norm(np.cross(forward, to_root), axis=1), np.sum(forward * to_root, axis=1))
        if angle.max() >= FOLLOW_CONE_RAD:
            failures.append(f"{path}: {angle.max():.3f} rad")
    return "; ".join(failures) or None


# ---------- solver ----------

def _noisy_problem(frames: int = 20) -> tuple[Scene, Observations]:
    scene = _scene(frames=frames)
    return scene, perturb(scene, NoiseModel(rp_noise_rad=0.02, seed=SEED))


@_property("solver fixed point")
def _solver_fixed_point(rng: np.random.Generator) -> str | None:
    scene = _scene(frames=20)
    obs = perturb(scene, NoiseModel())
    result = fit(obs, scene, SolverConfig(max_iters=5))
    drift = _max_err(result.state.to_vector(), SolverState.from_observations(obs).to_vector())
    if result.iterations != 0 or drift >= 1e-9:
        return f"{result.iterations} iterations, parameter drift {_fmt(drift)}"
    return None


@_property("solver loss never increases")
def _solver_monotone(rng: np.random.Generator) -> str | None:
    scene, obs = _noisy_problem()
    history = np.array(fit(obs, scene, SolverConfig(max_iters=10)).state.loss_history)
    rises = int(np.sum(np.diff(history) > 0))
    return None if rises == 0 else f"{rises} increases in {len(history)} losses"


@_property("finite differences agree along random directions")
def _fd_directions(rng: np.random.Generator) -> str | None:
    scene, obs = _noisy_problem()
    f = TrajectoryObjective(obs, scene)
    x, h = f.x_obs, 1e-5
    grad = finite_difference_gradient(f, x, h, batched=True)
    d = rng.normal(size=(10, x.size))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    directional = (f(x + h * d) - f(x - h * d)) / (2 * h)
    # relative to the gradient norm, the scale of a unit-direction derivative
    worst = float(np.max(np.abs(d @ grad - directional))) / max(float(np.linalg.norm(grad)), 1e-12)
    return None if worst < 1e-4 else f"relative error {_fmt(worst)}"


@_property("objective ignores a global yaw of the supervision")
def _objective_heading(rng: np.random.Generator) -> str | None:
    scene, obs = _noisy_problem()
    G = yaw_rotation(float(rng.uniform(-np.pi, np.pi)))

    def re_yaw(seq: MotionSequence) -> MotionSequence:
        joints = None if seq.joints is None else seq.joints @ G.T
        return seq.replace(rotations=G @ seq.rotations, positions=seq.positions @ G.T, joints=joints)

    state = SolverState.from_observations(obs)
    before = objective(state, obs, scene)
    after = objective(state, obs, Scene(camera=re_yaw(scene.camera), human=re_yaw(scene.human)))
    return None if abs(after - before) < 1e-9 else f"{after!r} != {before!r}"


def iter_selftest(seed: int = SEED) -> Iterator[PropertyResult]:
    for name, check in _PROPERTIES:
        rng = np.random.Generator(np.random.PCG64(seed))
        try:
            detail = check(rng)
        except Exception as exc:  # noqa: BLE001
            detail = f"{type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
        logger.debug("property %s: %s", name, "ok" if detail is None else detail)
        yield PropertyResult(name, detail is None, detail or "")


def run_selftest(seed: int = SEED) -> list[PropertyResult]:
    return list(iter_selftest(seed))
