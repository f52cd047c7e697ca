"""Gradient descent with backtracking line search on finite-difference gradients."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from headtraj.config import LossWeights, SolverConfig
from headtraj.exceptions import DegenerateInputError, SolverError
from headtraj.solver.objective import SolverState, TrajectoryObjective, rp_from_angles
from headtraj.types import Observations, Scene

logger = logging.getLogger(__name__)

Termination = Literal["converged", "tolerance", "max_iters", "stalled"]

FD_CHUNK_ROWS = 512
MAX_STEP_GROWTH = 1e3


def finite_difference_gradient(
    f: Callable[[np.ndarray], float | np.ndarray],
    x: np.ndarray,
    h: float = 1e-5,
    *,
    batched: bool = False,
    chunk_rows: int = FD_CHUNK_ROWS,
) -> np.ndarray:
    """Central differences (f(x + h e_i) - f(x - h e_i)) / 2h for every coordinate.

    With ``batched=True`` ``f`` receives (B, n) stacks of perturbed points
    and returns B values; points are evaluated ``chunk_rows`` at a time.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    if batched:
        values = np.empty(2 * n)
        eye = np.eye(n) * h
        points = np.concatenate([x + eye, x - eye], axis=0)
        for start in range(0, 2 * n, chunk_rows):
            values[start : start + chunk_rows] = f(points[start : start + chunk_rows])
        plus, minus = values[:n], values[n:]
    else:
        plus, minus = np.empty(n), np.empty(n)
        for i in range(n):
            e = np.zeros(n)
            e[i] = h
            plus[i], minus[i] = f(x + e), f(x - e)
    if not (np.all(np.isfinite(plus)) and np.all(np.isfinite(minus))):
        raise DegenerateInputError("objective is not finite around the evaluation point")
    return (plus - minus) / (2.0 * h)


@dataclass(frozen=True)
class FitResult:
    state: SolverState
    iterations: int
    termination: Termination

    @property
    def initial_loss(self) -> float:
        return self.state.loss_history[0]

    @property
    def final_loss(self) -> float:
        return self.state.loss_history[-1]


def fit(
    obs: Observations,
    supervision: Scene,
    cfg: SolverConfig | None = None,
    w: LossWeights | None = None,
) -> FitResult:
    """Minimize the trajectory objective starting from the observed factors.

    Each iteration tries a step from twice the last accepted one (capped at
    ``step_init * 1e3``) and halves it until the loss decreases.
    """
    cfg = cfg or SolverConfig()
    T = obs.frames
    if T > cfg.max_frames:
        raise SolverError(f"{T} frames exceeds the solver limit of {cfg.max_frames}")
    f = TrajectoryObjective(obs, supervision, w, cfg.data_weight)
    x = f.x_obs.copy()
    loss = float(f(x))
    history = [loss]
    if not np.isfinite(loss):
        raise SolverError("objective is not finite at the initial state")

    termination: Termination = "max_iters"
    iterations = 0
    step = cfg.step_init
    if loss <= cfg.loss_floor:
        termination = "converged"
    else:
        for it in range(cfg.max_iters):
            grad = finite_difference_gradient(f, x, cfg.fd_step, batched=True)
            trial = step if it == 0 else min(2.0 * step, cfg.step_init * MAX_STEP_GROWTH)
            accepted = None
            for _ in range(cfg.max_halvings + 1):
                candidate = x - trial * grad
                value = float(f(candidate))
                if value < loss:
                    accepted = (candidate, value)
                    break
                trial *= 0.5
            if accepted is None:
                if it == 0:
                    raise SolverError("objective not locally decreasable")
                termination = "stalled"
                break
            x, new_loss = accepted
            decrease = (loss - new_loss) / loss
            loss, step = new_loss, trial
            history.append(loss)
            iterations += 1
            logger.debug("iter %d loss=%.6g step=%.3g", iterations, loss, step)
            if loss <= cfg.loss_floor:
                termination = "converged"
                break
            if decrease < cfg.tol:
                termination = "tolerance"
                break

    logger.info(
        "fit %d frames: %s after %d iterations, loss %.6g -> %.6g",
        T, termination, iterations, history[0], history[-1],
    )
    return FitResult(SolverState.from_vector(x, T, tuple(history)), iterations, termination)


def state_to_observations(state: SolverState, obs: Observations) -> Observations:
    """``obs`` with its roll-pitch factors and local velocities replaced by the fitted ones."""
    if state.frames != obs.frames:
        raise SolverError(f"state has {state.frames} frames, observations {obs.frames}")
    return obs.replace(
        rp=rp_from_angles(state.rp_params),
        camera_local_velocity=state.camera_velocities,
        human_local_velocity=state.human_velocities,
    )
