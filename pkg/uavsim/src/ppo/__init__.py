# Proximal policy optimization
from .agent import (
    AdamOptimizer, PpoAgent, SgdOptimizer, TrainResult, clipped_objective, loss_and_grad,
    make_optimizer, prob_ratio, train, update,
)
from .checkpoint import load_checkpoint, read_reward_curve, save_checkpoint, write_reward_curve
from .distribution import deterministic_action, log_prob, sample_action
from .memory import Batch, TrajectoryMemory, gae
from .network import DistParams, PolicyParams, init_params, policy_forward

__all__ = [
    "AdamOptimizer", "PpoAgent", "SgdOptimizer", "TrainResult", "clipped_objective",
    "loss_and_grad", "make_optimizer", "prob_ratio", "train", "update",
    "load_checkpoint", "read_reward_curve", "save_checkpoint", "write_reward_curve",
    "deterministic_action", "log_prob", "sample_action",
    "Batch", "TrajectoryMemory", "gae",
    "DistParams", "PolicyParams", "init_params", "policy_forward",
]
