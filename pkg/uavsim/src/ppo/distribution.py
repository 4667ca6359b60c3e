"""
Squashed diagonal Gaussian over bounded actions.

Raw u ~ N(mean, std^2) is squashed by tanh and mapped affinely onto
[low, high]. Log-probabilities of actions include both Jacobians, so they
integrate to one over the action box.
"""

import math
from typing import Tuple

import numpy as np

from .network import DistParams

LOG_2PI = math.log(2.0 * math.pi)
LOG2 = math.log(2.0)


def _softplus(x: np.ndarray) -> np.ndarray:
    return np.logaddexp(0.0, x)


def log1m_tanh2(u: np.ndarray) -> np.ndarray:
    """Stable log(1 - tanh(u)^2) = 2 (log 2 - u - softplus(-2u))."""
    return 2.0 * (LOG2 - u - _softplus(-2.0 * u))


def squash(u: np.ndarray, low: np.ndarray, high: np.ndarray) -> np.ndarray:
    return low + (np.tanh(u) + 1.0) * 0.5 * (high - low)


def unsquash(action: np.ndarray, low: np.ndarray, high: np.ndarray, eps: float = 1e-12) -> np.ndarray:
    y = 2.0 * (np.asarray(action, dtype=float) - low) / (high - low) - 1.0
    return np.arctanh(np.clip(y, -1.0 + eps, 1.0 - eps))


def gaussian_log_prob(u: np.ndarray, dist: DistParams) -> np.ndarray:
    """Sum over action coordinates of the raw Gaussian log density."""
    z = (u - dist.mean) / dist.std
    return np.sum(-0.5 * z ** 2 - dist.log_std - 0.5 * LOG_2PI, axis=-1)


def squash_correction(u: np.ndarray, low: np.ndarray, high: np.ndarray) -> np.ndarray:
    """log |d action / d u| summed over coordinates."""
    return np.sum(log1m_tanh2(u) + np.log(0.5 * (high - low)), axis=-1)


def log_prob(u: np.ndarray, dist: DistParams, low: np.ndarray, high: np.ndarray) -> np.ndarray:
    """Log density of the squashed action produced by raw sample u."""
    return gaussian_log_prob(u, dist) - squash_correction(u, low, high)


def log_prob_action(action: np.ndarray, dist: DistParams, low: np.ndarray, high: np.ndarray) -> np.ndarray:
    return log_prob(unsquash(action, low, high), dist, low, high)


def entropy(dist: DistParams) -> np.ndarray:
    """Entropy of the raw Gaussian (the squashed entropy has no closed form)."""
    return np.sum(0.5 + 0.5 * LOG_2PI + dist.log_std, axis=-1)


def sample_action(dist: DistParams, rng: np.random.Generator, low: np.ndarray,
                  high: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Returns (action, log_prob, raw u)."""
    u = dist.mean + dist.std * rng.standard_normal(np.shape(dist.mean))
    return squash(u, low, high), log_prob(u, dist, low, high), u


def deterministic_action(dist: DistParams, low: np.ndarray, high: np.ndarray) -> np.ndarray:
    """Squashed mean, used for evaluation."""
    return squash(dist.mean, low, high)
