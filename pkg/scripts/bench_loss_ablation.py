#!/usr/bin/env python3
"""Which trajectory loss terms matter: fit the same noisy scene with each term switched off.

Runs four weight settings (both branches, human only, camera only, data
term only) on one preset and reports the final human and camera
trajectory errors, showing what supervising the camera trajectory
adds on top of the human one.

Usage:
    python scripts/bench_loss_ablation.py [--preset circle-orbit] [--frames 60]
"""
import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from headtraj.config import LossWeights, NoiseModel, SceneConfig, SolverConfig
from headtraj.metrics import rte
from headtraj.simulator import generate_scene, perturb
from headtraj.solver import fit, objective, state_to_observations
from headtraj.trajectory import reconstruct_from_observations
from headtraj.utils import atomic_write_json

SETTINGS = {
    "both": LossWeights(),
    "human only": LossWeights(lambda_cam=0.0),
    "camera only": LossWeights(lambda_h=0.0),
    "data only": LossWeights(lambda_h=0.0, lambda_cam=0.0),
}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--preset", default="circle-orbit")
    parser.add_argument("--frames", type=int, default=60)
    parser.add_argument("--rp-noise", type=float, default=0.02)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    gt = generate_scene(SceneConfig.from_preset(args.preset, frames=args.frames), seed=args.seed)
    obs = perturb(gt, NoiseModel(rp_noise_rad=args.rp_noise, seed=args.seed))
    camera_term = LossWeights(lambda_h=0.0)
    human_term = LossWeights(lambda_cam=0.0)

    print("=" * 72)
    print(f" LOSS ABLATION  preset={args.preset}  frames={args.frames}  rp_noise={args.rp_noise}")
    print("=" * 72)
    print(f"  {'Weights':<14} {'Human RTE%':>11} {'Camera RTE%':>12} {'traj_h':>10} {'traj_cam':>10}")
    print(f"  {'-'*14} {'-'*11} {'-'*12} {'-'*10} {'-'*10}")

    results = []
    for label, weights in SETTINGS.items():
        result = fit(obs, gt, SolverConfig(), weights)
        human, camera = reconstruct_from_observations(state_to_observations(result.state, obs))
        row = {
            "weights": label,
            "human_rte": rte(human.positions, gt.human.positions, human.rotations, gt.human.rotations),
            "camera_rte": rte(camera.positions, gt.camera.positions, camera.rotations, gt.camera.rotations),
            "traj_h": objective(result.state, obs, gt, human_term, data_weight=0.0),
            "traj_cam": objective(result.state, obs, gt, camera_term, data_weight=0.0),
            "iterations": result.iterations,
        }
        results.append(row)
        print(f"  {label:<14} {row['human_rte']:>11.3f} {row['camera_rte']:>12.3f} "
              f"{row['traj_h']:>10.5f} {row['traj_cam']:>10.5f}")

    print()
    out_dir = os.path.join(os.path.dirname(__file__), "..", "results", "ablation")
    out_file = atomic_write_json(os.path.join(out_dir, f"{args.preset}.json"), results)
    print(f"Results saved to: {out_file}")


if __name__ == "__main__":
    main()
