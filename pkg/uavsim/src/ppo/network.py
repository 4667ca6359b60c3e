"""
Shared actor-critic network in plain numpy.

A tanh trunk feeds three linear heads: action means, action log-stds
(clamped to [LOG_STD_MIN, LOG_STD_MAX]) and a scalar value. Backprop is
written out by hand; tests check it against finite differences.
"""

from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from ..core.errors import DomainError

LOG_STD_MIN = -5.0
LOG_STD_MAX = 2.0
LOG_STD_INIT = -0.5


@dataclass
class PolicyParams:
    """Named weight/bias arrays; W{i}/b{i} for the trunk, W_{head}/b_{head} for heads."""
    arrays: Dict[str, np.ndarray]

    @property
    def n_hidden(self) -> int:
        return sum(1 for name in self.arrays if name.startswith("W") and name[1:].isdigit())

    @property
    def obs_size(self) -> int:
        return self.arrays["W0"].shape[0]

    @property
    def action_size(self) -> int:
        return self.arrays["W_mu"].shape[1]

    def names(self) -> List[str]:
        return list(self.arrays)

    def shapes(self) -> Dict[str, Tuple[int, ...]]:
        return {name: tuple(a.shape) for name, a in self.arrays.items()}

    def copy(self) -> "PolicyParams":
        return PolicyParams({name: a.copy() for name, a in self.arrays.items()})

    def zeros_like(self) -> "PolicyParams":
        return PolicyParams({name: np.zeros_like(a) for name, a in self.arrays.items()})

    def flatten(self) -> np.ndarray:
        return np.concatenate([a.reshape(-1) for a in self.arrays.values()])

    def unflatten(self, vector: np.ndarray) -> "PolicyParams":
        """New params with this object's layout and `vector`'s values."""
        vector = np.asarray(vector, dtype=float).reshape(-1)
        out, offset = {}, 0
        for name, a in self.arrays.items():
            out[name] = vector[offset:offset + a.size].reshape(a.shape).copy()
            offset += a.size
        if offset != vector.size:
            raise DomainError(f"Parameter vector has {vector.size} entries, layout needs {offset}")
        return PolicyParams(out)

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in self.arrays.values())


@dataclass
class ForwardCache:
    inputs: np.ndarray
    activations: List[np.ndarray]
    mean: np.ndarray
    log_std_raw: np.ndarray
    log_std: np.ndarray
    value: np.ndarray


@dataclass
class DistParams:
    """Diagonal Gaussian over the pre-squash action coordinates."""
    mean: np.ndarray
    log_std: np.ndarray

    @property
    def std(self) -> np.ndarray:
        return np.exp(self.log_std)


def init_params(obs_size: int, action_size: int, hidden_layers: int, hidden_units: int,
                rng: np.random.Generator) -> PolicyParams:
    """Glorot-uniform trunk, small mean head, log-std bias at LOG_STD_INIT."""
    arrays: Dict[str, np.ndarray] = {}
    fan_in = obs_size
    for i in range(hidden_layers):
        limit = np.sqrt(6.0 / (fan_in + hidden_units))
        arrays[f"W{i}"] = rng.uniform(-limit, limit, size=(fan_in, hidden_units))
        arrays[f"b{i}"] = np.zeros(hidden_units)
        fan_in = hidden_units
    arrays["W_mu"] = rng.normal(0.0, 0.01, size=(fan_in, action_size))
    arrays["b_mu"] = np.zeros(action_size)
    arrays["W_ls"] = np.zeros((fan_in, action_size))
    arrays["b_ls"] = np.full(action_size, LOG_STD_INIT)
    arrays["W_v"] = rng.normal(0.0, 0.01, size=(fan_in, 1))
    arrays["b_v"] = np.zeros(1)
    return PolicyParams(arrays)


def forward(states: np.ndarray, params: PolicyParams) -> ForwardCache:
    """Batched forward pass over states of shape (B, obs) or (obs,)."""
    x = np.atleast_2d(np.asarray(states, dtype=float))
    if x.shape[1] != params.obs_size:
        raise DomainError(f"State has {x.shape[1]} entries, network expects {params.obs_size}")
    activations = []
    h = x
    for i in range(params.n_hidden):
        h = np.tanh(h @ params.arrays[f"W{i}"] + params.arrays[f"b{i}"])
        activations.append(h)
    mean = h @ params.arrays["W_mu"] + params.arrays["b_mu"]
    log_std_raw = h @ params.arrays["W_ls"] + params.arrays["b_ls"]
    value = (h @ params.arrays["W_v"] + params.arrays["b_v"])[:, 0]
    return ForwardCache(
        inputs=x, activations=activations, mean=mean, log_std_raw=log_std_raw,
        log_std=np.clip(log_std_raw, LOG_STD_MIN, LOG_STD_MAX), value=value,
    )


def policy_forward(state: np.ndarray, params: PolicyParams) -> Tuple[DistParams, np.ndarray]:
    """(distribution parameters, value) for one state or a batch."""
    cache = forward(state, params)
    return DistParams(mean=cache.mean, log_std=cache.log_std), cache.value


def backward(cache: ForwardCache, params: PolicyParams, d_mean: np.ndarray,
             d_log_std: np.ndarray, d_value: np.ndarray) -> PolicyParams:
    """Gradients of a scalar loss given its partials w.r.t. the three head outputs."""
    grads: Dict[str, np.ndarray] = {}
    h_last = cache.activations[-1] if cache.activations else cache.inputs
    # the clamp passes no gradient outside its range
    inside = (cache.log_std_raw >= LOG_STD_MIN) & (cache.log_std_raw <= LOG_STD_MAX)
    d_ls = np.where(inside, d_log_std, 0.0)
    d_v = np.asarray(d_value, dtype=float).reshape(-1, 1)

    grads["W_mu"] = h_last.T @ d_mean
    grads["b_mu"] = d_mean.sum(axis=0)
    grads["W_ls"] = h_last.T @ d_ls
    grads["b_ls"] = d_ls.sum(axis=0)
    grads["W_v"] = h_last.T @ d_v
    grads["b_v"] = d_v.sum(axis=0)

    d_h = d_mean @ params.arrays["W_mu"].T + d_ls @ params.arrays["W_ls"].T + d_v @ params.arrays["W_v"].T
    for i in reversed(range(params.n_hidden)):
        h = cache.activations[i]
        d_pre = d_h * (1.0 - h ** 2)
        below = cache.activations[i - 1] if i > 0 else cache.inputs
        grads[f"W{i}"] = below.T @ d_pre
        grads[f"b{i}"] = d_pre.sum(axis=0)
        d_h = d_pre @ params.arrays[f"W{i}"].T

    return PolicyParams({name: grads[name] for name in params.arrays})
