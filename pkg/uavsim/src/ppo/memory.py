"""
On-policy rollout storage and generalized advantage estimation.
"""

from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import DomainError


def gae(rewards: Sequence[float], values: Sequence[float], dones: Sequence[bool],
        discount: float, lam: float) -> Tuple[np.ndarray, np.ndarray]:
    """Advantages and returns.

    `values` holds V(s_0..s_{n-1}) and optionally V(s_n) as a final bootstrap
    entry; without it the bootstrap value is 0. The recursion restarts after
    every done flag.
    """
    rewards = np.asarray(rewards, dtype=float)
    dones = np.asarray(dones, dtype=bool)
    values = np.asarray(values, dtype=float)
    n = rewards.shape[0]
    if values.shape[0] == n:
        values = np.append(values, 0.0)
    if values.shape[0] != n + 1 or dones.shape[0] != n:
        raise DomainError("rewards, dones and values must have matching lengths")

    advantages = np.zeros(n)
    running = 0.0
    for t in reversed(range(n)):
        live = 0.0 if dones[t] else 1.0
        delta = rewards[t] + discount * values[t + 1] * live - values[t]
        running = delta + discount * lam * live * running
        advantages[t] = running
    return advantages, advantages + values[:n]


def normalize(advantages: np.ndarray, eps: float = 1e-8) -> np.ndarray:
    advantages = np.asarray(advantages, dtype=float)
    if advantages.size < 2:
        return advantages - advantages.mean() if advantages.size else advantages
    return (advantages - advantages.mean()) / (advantages.std() + eps)


@dataclass
class Batch:
    states: np.ndarray
    raw_actions: np.ndarray
    old_log_probs: np.ndarray
    advantages: np.ndarray
    returns: np.ndarray

    def __len__(self) -> int:
        return self.states.shape[0]

    def subset(self, idx: np.ndarray) -> "Batch":
        return Batch(self.states[idx], self.raw_actions[idx], self.old_log_probs[idx],
                     self.advantages[idx], self.returns[idx])


@dataclass
class _Segment:
    states: List[np.ndarray] = field(default_factory=list)
    raw_actions: List[np.ndarray] = field(default_factory=list)
    log_probs: List[float] = field(default_factory=list)
    rewards: List[float] = field(default_factory=list)
    values: List[float] = field(default_factory=list)
    dones: List[bool] = field(default_factory=list)
    last_value: float = 0.0


class TrajectoryMemory:
    """One segment per actor rollout; advantages are computed per segment."""

    def __init__(self, capacity: Optional[int] = None):
        self.capacity = capacity
        self.segments: List[_Segment] = []
        self._open: Optional[_Segment] = None

    def __len__(self) -> int:
        return sum(len(s.rewards) for s in self.segments) + (len(self._open.rewards) if self._open else 0)

    def start_segment(self) -> None:
        if self._open is not None:
            self.end_segment()
        self._open = _Segment()

    def add(self, state: np.ndarray, raw_action: np.ndarray, log_prob: float,
            reward: float, value: float, done: bool) -> None:
        if self._open is None:
            self.start_segment()
        if self.capacity is not None and len(self) >= self.capacity:
            raise OverflowError(f"TrajectoryMemory is full ({self.capacity} steps)")
        seg = self._open
        seg.states.append(np.asarray(state, dtype=float))
        seg.raw_actions.append(np.asarray(raw_action, dtype=float))
        seg.log_probs.append(float(log_prob))
        seg.rewards.append(float(reward))
        seg.values.append(float(value))
        seg.dones.append(bool(done))

    def end_segment(self, last_value: float = 0.0) -> None:
        """Close the open rollout; last_value bootstraps a rollout cut before done."""
        if self._open is None:
            return
        self._open.last_value = float(last_value)
        if self._open.rewards:
            self.segments.append(self._open)
        self._open = None

    def clear(self) -> None:
        self.segments = []
        self._open = None

    def to_batch(self, discount: float, lam: float, normalize_advantages: bool = True) -> Batch:
        """Run GAE over every closed segment and stack the result."""
        if self._open is not None:
            self.end_segment()
        if not self.segments:
            raise DomainError("TrajectoryMemory is empty")
        adv_parts, ret_parts = [], []
        for seg in self.segments:
            adv, ret = gae(seg.rewards, seg.values + [seg.last_value], seg.dones, discount, lam)
            adv_parts.append(adv)
            ret_parts.append(ret)
        advantages = np.concatenate(adv_parts)
        if normalize_advantages:
            advantages = normalize(advantages)
        return Batch(
            states=np.stack([s for seg in self.segments for s in seg.states]),
            raw_actions=np.stack([a for seg in self.segments for a in seg.raw_actions]),
            old_log_probs=np.array([lp for seg in self.segments for lp in seg.log_probs]),
            advantages=advantages,
            returns=np.concatenate(ret_parts),
        )


def minibatches(n: int, size: int, rng: np.random.Generator) -> Iterator[np.ndarray]:
    """Shuffled index blocks; size is capped at n."""
    size = max(1, min(size, n))
    order = rng.permutation(n)
    for start in range(0, n, size):
        yield order[start:start + size]
