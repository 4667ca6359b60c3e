"""
Clipped-surrogate PPO: loss, analytic gradient, update and the training loop.

loss = -mean(min(r A, clip(r, 1-eps, 1+eps) A)) + c_v mean((V - R)^2) - c_e H

Minimizing this loss is gradient ascent on the clipped objective minus the
weighted value error plus the entropy bonus.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from ..core.config import PpoConfig
from ..core.errors import NonFiniteLossError
from ..env.uav_env import StepOutcome, UavEnv, action_bounds
from .distribution import deterministic_action, entropy, log_prob, sample_action
from .memory import Batch, TrajectoryMemory, minibatches
from .network import DistParams, PolicyParams, backward, forward, init_params, policy_forward

logger = logging.getLogger(__name__)

Bounds = Tuple[np.ndarray, np.ndarray]


def prob_ratio(logp_new: np.ndarray, logp_old: np.ndarray) -> np.ndarray:
    return np.exp(np.asarray(logp_new, dtype=float) - np.asarray(logp_old, dtype=float))


def clipped_objective(r: np.ndarray, advantages: np.ndarray, epsilon: float) -> float:
    """Minibatch mean of min(r A, clip(r, 1-eps, 1+eps) A)."""
    r = np.asarray(r, dtype=float)
    advantages = np.asarray(advantages, dtype=float)
    surr = np.minimum(r * advantages, np.clip(r, 1.0 - epsilon, 1.0 + epsilon) * advantages)
    return float(np.mean(surr))


def loss_and_grad(params: PolicyParams, batch: Batch, config: PpoConfig,
                  bounds: Bounds) -> Tuple[float, PolicyParams, Dict[str, float]]:
    low, high = bounds
    n = len(batch)
    eps = config.clip_epsilon
    cache = forward(batch.states, params)
    dist = DistParams(mean=cache.mean, log_std=cache.log_std)
    u = batch.raw_actions
    adv = batch.advantages

    logp = log_prob(u, dist, low, high)
    r = prob_ratio(logp, batch.old_log_probs)
    unclipped = r * adv
    clipped = np.clip(r, 1.0 - eps, 1.0 + eps) * adv
    policy_loss = -float(np.mean(np.minimum(unclipped, clipped)))
    value_err = cache.value - batch.returns
    value_loss = float(np.mean(value_err ** 2))
    ent = float(np.mean(entropy(dist)))
    loss = policy_loss + config.value_coef * value_loss - config.entropy_coef * ent

    # d loss / d logp is nonzero only where the unclipped branch is the minimum
    active = unclipped <= clipped
    d_logp = np.where(active, -adv * r, 0.0) / n
    std = np.exp(cache.log_std)
    z = (u - cache.mean) / std
    d_mean = d_logp[:, None] * z / std
    d_log_std = d_logp[:, None] * (z ** 2 - 1.0) - config.entropy_coef / n
    d_value = config.value_coef * 2.0 * value_err / n
    grads = backward(cache, params, d_mean, np.broadcast_to(d_log_std, cache.log_std.shape), d_value)

    stats = {
        "loss": loss,
        "policy_loss": policy_loss,
        "value_loss": value_loss,
        "entropy": ent,
        "clip_fraction": float(np.mean(np.abs(r - 1.0) > eps)),
        "approx_kl": float(np.mean(batch.old_log_probs - logp)),
    }
    return loss, grads, stats


class SgdOptimizer:
    """Plain first-order step: theta <- theta - lr * grad."""

    def __init__(self, learning_rate: float):
        self.learning_rate = learning_rate

    def step(self, params: PolicyParams, grads: PolicyParams) -> PolicyParams:
        return PolicyParams({
            name: a - self.learning_rate * grads.arrays[name] for name, a in params.arrays.items()
        })


class AdamOptimizer:
    def __init__(self, learning_rate: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.learning_rate = learning_rate
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.t = 0
        self.m: Dict[str, np.ndarray] = {}
        self.v: Dict[str, np.ndarray] = {}

    def step(self, params: PolicyParams, grads: PolicyParams) -> PolicyParams:
        self.t += 1
        out = {}
        for name, a in params.arrays.items():
            g = grads.arrays[name]
            m = self.beta1 * self.m.get(name, np.zeros_like(a)) + (1 - self.beta1) * g
            v = self.beta2 * self.v.get(name, np.zeros_like(a)) + (1 - self.beta2) * g ** 2
            self.m[name], self.v[name] = m, v
            m_hat = m / (1 - self.beta1 ** self.t)
            v_hat = v / (1 - self.beta2 ** self.t)
            out[name] = a - self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)
        return PolicyParams(out)


def make_optimizer(config: PpoConfig) -> Union[SgdOptimizer, AdamOptimizer]:
    if config.optimizer == "adam":
        return AdamOptimizer(config.learning_rate)
    return SgdOptimizer(config.learning_rate)


def clip_grad_norm(grads: PolicyParams, max_norm: Optional[float]) -> Tuple[PolicyParams, float]:
    norm = float(np.linalg.norm(grads.flatten()))
    if max_norm is None or norm <= max_norm:
        return grads, norm
    scale = max_norm / (norm + 1e-12)
    return PolicyParams({name: g * scale for name, g in grads.arrays.items()}), norm


def update(memory: Union[TrajectoryMemory, Batch], params: PolicyParams, config: PpoConfig,
           bounds: Bounds, rng: np.random.Generator, optimizer=None,
           normalize_advantages: bool = True) -> Tuple[PolicyParams, Dict[str, float]]:
    """`epochs` passes of shuffled minibatches. Returns new params and averaged stats."""
    if isinstance(memory, TrajectoryMemory):
        batch = memory.to_batch(config.discount, config.gae_lambda, normalize_advantages)
    else:
        batch = memory
    optimizer = optimizer or make_optimizer(config)
    totals: Dict[str, float] = {}
    steps = 0
    for epoch in range(config.epochs):
        for idx in minibatches(len(batch), config.minibatch_size, rng):
            loss, grads, stats = loss_and_grad(params, batch.subset(idx), config, bounds)
            grads, grad_norm = clip_grad_norm(grads, config.max_grad_norm)
            if not (np.isfinite(loss) and np.isfinite(grad_norm)):
                diagnostics = dict(stats, grad_norm=grad_norm, epoch=epoch, minibatch=steps)
                logger.error(f"Aborting PPO update, non-finite loss/gradient: {diagnostics}")
                raise NonFiniteLossError("PPO loss or gradient is not finite", diagnostics)
            params = optimizer.step(params, grads)
            for key, value in stats.items():
                totals[key] = totals.get(key, 0.0) + value
            steps += 1
    return params, {key: value / max(steps, 1) for key, value in totals.items()}


@dataclass
class TrainResult:
    params: PolicyParams
    reward_curve: List[float] = field(default_factory=list)
    update_stats: List[Dict[str, float]] = field(default_factory=list)
    elapsed_s: float = 0.0                   # wall clock of the whole loop


class PpoAgent:
    """Centralized agent steering all UAVs of one environment layout."""

    def __init__(self, obs_size: int, action_size: int, config: PpoConfig, bounds: Bounds,
                 seed: int = 0, params: Optional[PolicyParams] = None):
        self.config = config
        self.bounds = bounds
        init_rng = np.random.default_rng([seed, 0])
        self.params = params or init_params(obs_size, action_size, config.hidden_layers,
                                            config.hidden_units, init_rng)
        self.params_old = self.params.copy()
        self.optimizer = make_optimizer(config)
        self._shuffle_rng = np.random.default_rng([seed, 3])

    def act(self, state: np.ndarray, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray, float, float]:
        """Sample from the behaviour policy: (action, raw u, log_prob, value)."""
        dist, value = policy_forward(state, self.params_old)
        action, logp, u = sample_action(dist, rng, *self.bounds)
        return action[0], u[0], float(logp[0]), float(value[0])

    def act_deterministic(self, state: np.ndarray) -> np.ndarray:
        dist, _ = policy_forward(state, self.params)
        return deterministic_action(dist, *self.bounds)[0]

    def update(self, memory: TrajectoryMemory) -> Dict[str, float]:
        self.params, stats = update(memory, self.params, self.config, self.bounds,
                                    self._shuffle_rng, optimizer=self.optimizer)
        self.params_old = self.params.copy()
        memory.clear()
        return stats


def episode_seed(rng_seed: int, episode: int) -> int:
    """GU-layout seed shared by every actor of one episode."""
    return int(np.random.SeedSequence([rng_seed, 1, episode]).generate_state(1)[0])


def rollout(env: UavEnv, agent: PpoAgent, memory: TrajectoryMemory, layout_seed: int,
            rng: np.random.Generator) -> float:
    """Run one episode with the behaviour policy; returns its cumulative reward."""
    state, _ = env.reset(layout_seed)
    memory.start_segment()
    total = 0.0
    done = False
    while not done:
        action, u, logp, value = agent.act(state, rng)
        outcome = StepOutcome(*env.step(action))
        memory.add(state, u, logp, outcome.reward, value, outcome.done)
        total += outcome.reward
        state, done = outcome.next_state, outcome.done
    memory.end_segment(0.0)
    return total


def train(env_factory: Callable[[], UavEnv], ppo_config: PpoConfig, rng_seed: int,
          on_episode: Optional[Callable[[int, float, Dict[str, float]], Any]] = None) -> TrainResult:
    """Training loop: A actors roll out the old policy, then one PPO update per episode."""
    start = time.perf_counter()
    envs = [env_factory() for _ in range(ppo_config.actors)]
    net = envs[0].config
    agent = PpoAgent(envs[0].observation_size, envs[0].action_size, ppo_config,
                     action_bounds(net), seed=rng_seed)
    result = TrainResult(params=agent.params.copy())
    memory = TrajectoryMemory(capacity=ppo_config.actors * net.n_slots)

    for episode in range(ppo_config.episodes):
        layout = episode_seed(rng_seed, episode)
        returns = []
        for actor, env in enumerate(envs):
            action_rng = np.random.default_rng([rng_seed, 2, episode, actor])
            returns.append(rollout(env, agent, memory, layout, action_rng))
        stats = agent.update(memory)
        mean_return = float(np.mean(returns))
        result.reward_curve.append(mean_return)
        result.update_stats.append(stats)
        if on_episode is not None:
            on_episode(episode, mean_return, stats)
        if (episode + 1) % 100 == 0 or episode + 1 == ppo_config.episodes:
            logger.info(f"episode {episode + 1}/{ppo_config.episodes}: mean_reward={mean_return:.4f} "
                        f"clip_fraction={stats.get('clip_fraction', 0.0):.3f}")

    result.params = agent.params.copy()
    result.elapsed_s = time.perf_counter() - start
    logger.info(f"Trained {ppo_config.episodes} episodes in {result.elapsed_s:.1f} s")
    return result
