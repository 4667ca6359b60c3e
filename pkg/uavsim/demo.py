#!/usr/bin/env python3
"""
Simulator demo

Walks through one scenario: clustering, SCA power allocation, an episode of
each static scheme and a few PPO training episodes on the desk-scale task.
"""

import os
import sys
from datetime import datetime

import numpy as np

# Ensure the uavsim/ directory is on sys.path so the `src` package is importable
HERE = os.path.dirname(__file__)
if HERE not in sys.path:
    sys.path.insert(0, HERE)

from src.association.bkmc import bkmc
from src.core.channel import mean_gu_rate
from src.core.config import NetworkConfig, PpoConfig
from src.core.errors import UavSimError
from src.env.scenario import generate_scenario
from src.env.uav_env import UavEnv
from src.harness.runner import run_scheme, summarize
from src.harness.schemes import ExperimentSpec, Scheme
from src.power.policies import uniform_power
from src.power.sca import sca
from src.ppo.agent import train


def print_separator(title=""):
    """Print a visual separator."""
    if title:
        print(f"\n{'='*60}")
        print(f" {title}")
        print(f"{'='*60}")
    else:
        print("-" * 60)


def demo_clustering_and_power():
    print_separator("CLUSTERING + SCA DEMO")
    config = NetworkConfig()
    topology = generate_scenario(config, seed=0)
    clustering = bkmc(topology.gu_pos, topology.uav_pos[:, :2])
    association = clustering.association
    print(f"Cluster sizes: {association.cluster_sizes()}  "
          f"(BKMC iterations={clustering.iterations}, converged={clustering.converged})")

    uniform = uniform_power(association, config)
    powers, report = sca(None, topology, association, config)
    print(f"Mean GU rate, uniform power: {mean_gu_rate(topology, association, uniform, config):.4e} bit/s")
    print(f"Mean GU rate, SCA power:     {mean_gu_rate(topology, association, powers, config):.4e} bit/s")
    print(f"SCA outer iterations: {report.iterations}, converged={report.converged}")
    print(f"Objective trace: {np.round(report.objective_trace, 4).tolist()}")


def demo_static_schemes():
    print_separator("STATIC SCHEMES DEMO")
    network = NetworkConfig(n_uavs=2, n_gus=8, area_side=50.0)
    for scheme in (Scheme.SU_RP, Scheme.SU_PP):
        run = run_scheme(ExperimentSpec(scheme=scheme, seeds=[0, 1, 2], network=network))
        for row in summarize(run.records):
            if row.metric == "mean_gu_rate":
                print(f"{scheme.value}: mean GU rate {row.mean:.4e} +/- {row.std:.2e} bit/s "
                      f"over {row.n_seeds} seeds")


def demo_training():
    print_separator("PPO TRAINING DEMO")
    network = NetworkConfig(n_uavs=2, n_gus=8, area_side=50.0, n_slots=10)
    ppo = PpoConfig(episodes=5, actors=2, hidden_units=32)
    result = train(lambda: UavEnv(network), ppo, rng_seed=0)
    for episode, value in enumerate(result.reward_curve):
        print(f"episode {episode}: mean reward {value:.4f}")


def demo_error_handling():
    print_separator("ERROR HANDLING DEMO")
    attempts = [
        ("M < K", lambda: NetworkConfig(n_uavs=4, n_gus=3)),
        ("OU scheme without a checkpoint", lambda: run_scheme(ExperimentSpec(scheme="ou-pp", seeds=[0]))),
    ]
    for label, attempt in attempts:
        try:
            attempt()
            print(f"{label}: no error")
        except UavSimError as e:
            print(f"{label}: {type(e).__name__}: {e}")


def main():
    """Run all demos."""
    print_separator("THz MULTI-UAV SIMULATOR DEMO")
    print(f"Started at: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")

    try:
        demo_clustering_and_power()
        demo_static_schemes()
        demo_training()
        demo_error_handling()

        print_separator("DEMO COMPLETED")
        print("All demos completed successfully!")

    except Exception as e:
        print(f"\nDemo failed with error: {e}")
        import traceback
        traceback.print_exc()
        return 1

    return 0


if __name__ == "__main__":
    exit(main())
