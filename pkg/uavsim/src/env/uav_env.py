"""
Trajectory-control environment.

One agent steers all K UAVs. A step turns and moves every UAV, allocates
transmit power with the configured policy, and scores the slot:

    -2  and done   if any two UAVs are closer than d_min
    +2  and done   on the last slot
    sum_k R^lo_k * reward_scale  otherwise

GUs are placed once per episode and association runs once, at reset.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import gymnasium as gym
import numpy as np
from gymnasium import spaces

from ..association.bkmc import BkmcResult, bkmc
from ..core.channel import link_rates, uav_slot_rates
from ..core.config import NetworkConfig
from ..core.constraints import ViolationReport, check_constraints
from ..core.errors import DomainError, EpisodeFinishedError
from ..core.model import Association, PowerAllocation, Topology
from ..power.policies import PowerPolicy, make_power_policy
from ..power.sca import dc_objective
from .scenario import generate_scenario, initial_uav_positions

logger = logging.getLogger(__name__)

MAX_TURN = np.pi / 3
PROXIMITY_PENALTY = -2.0
COMPLETION_BONUS = 2.0


@dataclass
class TraceRecord:
    """One UAV at one slot."""
    slot: int
    uav_id: int
    x: float
    y: float
    z: float
    v: float
    phi: float
    rate: float          # R^lo of this UAV, bit/s
    reward: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class StepOutcome:
    """Named view of the (obs, reward, terminated, truncated, info) tuple from step()."""
    next_state: np.ndarray
    reward: float
    terminated: bool
    truncated: bool
    info: Dict[str, Any] = field(default_factory=dict)

    @property
    def done(self) -> bool:
        return self.terminated or self.truncated


def observation_size(config: NetworkConfig) -> int:
    return 3 * config.n_uavs + 2 * config.n_gus


def action_bounds(config: NetworkConfig) -> Tuple[np.ndarray, np.ndarray]:
    """(low, high) for the interleaved [v_0, phi_0, v_1, phi_1, ...] action."""
    low = np.tile([0.0, -MAX_TURN], config.n_uavs)
    high = np.tile([config.v_max, MAX_TURN], config.n_uavs)
    return low, high


def wrap_angle(theta: np.ndarray) -> np.ndarray:
    """Map to [-pi, pi)."""
    return (np.asarray(theta, dtype=float) + np.pi) % (2.0 * np.pi) - np.pi


def raw_reward(topology: Topology, association: Association, powers: PowerAllocation,
               config: NetworkConfig) -> float:
    """Dense reward: scaled sum of per-UAV slot rates."""
    return float(np.sum(uav_slot_rates(topology, association, powers, config)) * config.reward_scale)


def encode_state(topology: Topology, config: NetworkConfig) -> np.ndarray:
    uav = topology.uav_pos / np.array([config.area_side, config.area_side, config.uav_altitude])
    gu = topology.gu_pos / config.area_side
    return np.concatenate([uav.reshape(-1), gu.reshape(-1)])


class UavEnv(gym.Env):
    """Single-threaded episode state machine; one instance per actor.

    Follows the gymnasium contract: reset(seed) -> (obs, info) and
    step(action) -> (obs, reward, terminated, truncated, info). A proximity
    violation terminates; reaching the last slot truncates.
    """

    metadata = {"render_modes": []}

    def __init__(self, config: NetworkConfig, power_policy: Optional[PowerPolicy] = None,
                 trace_callback: Optional[Callable[[TraceRecord], None]] = None):
        self.config = config
        self.power_policy = power_policy or make_power_policy(config.power_policy, config)
        self.trace_callback = trace_callback
        low, high = action_bounds(config)
        self.action_space = spaces.Box(low=low, high=high, dtype=np.float64)
        self.observation_space = spaces.Box(low=0.0, high=1.0, shape=(observation_size(config),),
                                            dtype=np.float64)
        self.trace: List[TraceRecord] = []
        self.topology: Optional[Topology] = None
        self.association: Optional[Association] = None
        self.clustering: Optional[BkmcResult] = None
        self.slot = 0
        self.done = True
        self.episode_reward = 0.0
        self._rng = np.random.default_rng()

    @property
    def observation_size(self) -> int:
        return observation_size(self.config)

    @property
    def action_size(self) -> int:
        return 2 * self.config.n_uavs

    def reset(self, seed: Optional[int] = None,
              options: Optional[Dict[str, Any]] = None) -> Tuple[np.ndarray, Dict[str, Any]]:
        super().reset(seed=seed)
        if seed is None:
            seed = int(self.np_random.integers(2 ** 62))
        # power draws get their own stream, GU placement uses the bare seed
        self._rng = np.random.default_rng([seed, 1])
        self.topology = generate_scenario(self.config, seed)
        self.clustering = bkmc(self.topology.gu_pos, self.topology.uav_pos[:, :2],
                               max_iters=self.config.bkmc_max_iters)
        self.association = self.clustering.association
        reset_policy = getattr(self.power_policy, "reset", None)
        if reset_policy is not None:
            reset_policy()
        self.slot = 1
        self.done = False
        self.episode_reward = 0.0
        self.trace = []
        logger.debug(f"reset seed={seed} clusters={self.association.cluster_sizes().tolist()}")
        return self.state(), dict(self.layout(), seed=seed)

    def layout(self) -> Dict[str, Any]:
        """GU positions, their serving UAVs and the UAV start positions of this episode."""
        if self.topology is None:
            raise EpisodeFinishedError("reset() must be called before the layout is read")
        return {
            "gu_pos": self.topology.gu_pos.tolist(),
            "assign": self.association.to_list(),
            "uav_start": initial_uav_positions(self.config).tolist(),
        }

    def state(self) -> np.ndarray:
        if self.topology is None:
            raise EpisodeFinishedError("reset() must be called before the state is read")
        return encode_state(self.topology, self.config)

    def clamp_action(self, action: Sequence[float]) -> np.ndarray:
        action = np.asarray(action, dtype=float).reshape(-1)
        if action.shape[0] != self.action_size:
            raise DomainError(f"Action must have length {self.action_size}, got {action.shape[0]}")
        return np.clip(action, self.action_space.low, self.action_space.high)

    def move(self, action: np.ndarray) -> Topology:
        """Apply turn-then-advance dynamics, clamped to the area box."""
        speed, turn = action[0::2], action[1::2]
        heading = wrap_angle(self.topology.uav_heading + turn)
        step = speed * self.config.slot_duration
        pos = self.topology.uav_pos.copy()
        pos[:, 0] += step * np.cos(heading)
        pos[:, 1] += step * np.sin(heading)
        pos[:, :2] = np.clip(pos[:, :2], 0.0, self.config.area_side)
        pos[:, 2] = self.config.uav_altitude
        return Topology(uav_pos=pos, uav_heading=heading, gu_pos=self.topology.gu_pos)

    def step(self, action: Sequence[float]) -> Tuple[np.ndarray, float, bool, bool, Dict[str, Any]]:
        if self.done:
            raise EpisodeFinishedError("Episode is finished; call reset() first")
        action = self.clamp_action(action)
        previous = self.topology
        self.topology = self.move(action)

        powers, sca_report = self.power_policy(self.topology, self.association, self._rng)
        report = check_constraints([self.topology], self.association, powers, self.config,
                                   previous=previous, first_slot=self.slot)
        uav_rates = uav_slot_rates(self.topology, self.association, powers, self.config)
        at_horizon = self.slot >= self.config.n_slots

        if report.has("separation"):
            reward = PROXIMITY_PENALTY
            terminated = self.config.terminate_on_violation
        elif at_horizon:
            reward = COMPLETION_BONUS
            terminated = False
        else:
            reward = raw_reward(self.topology, self.association, powers, self.config)
            terminated = False
        truncated = at_horizon and not terminated

        info = self._info(powers, report, uav_rates, sca_report)
        self._record(action, uav_rates, reward)
        self.episode_reward += reward
        self.done = terminated or truncated
        if self.done:
            logger.debug(f"episode done at slot {self.slot}: return={self.episode_reward:.4f}")
        else:
            self.slot += 1
        return self.state(), reward, terminated, truncated, info

    def _info(self, powers: PowerAllocation, report: ViolationReport, uav_rates: np.ndarray,
              sca_report) -> Dict[str, Any]:
        rates = link_rates(self.topology, self.association, powers, self.config)
        links = powers.links(self.association)
        dc = dc_objective(powers, self.topology, self.association, self.config) if np.all(links > 0) else None
        return {
            "slot": self.slot,
            "uav_rates": uav_rates.tolist(),
            "mean_gu_rate": float(np.mean(rates)),
            "dc_objective": dc,
            "powers": powers,
            "constraints": report,
            "violations": {cid: report.has(cid) for cid in report.violations},
            "sca": sca_report,
        }

    def _record(self, action: np.ndarray, uav_rates: np.ndarray, reward: float) -> None:
        for k in range(self.config.n_uavs):
            x, y, z = self.topology.uav_pos[k]
            record = TraceRecord(
                slot=self.slot, uav_id=k, x=float(x), y=float(y), z=float(z),
                v=float(action[2 * k]), phi=float(action[2 * k + 1]),
                rate=float(uav_rates[k]), reward=float(reward),
            )
            self.trace.append(record)
            if self.trace_callback is not None:
                self.trace_callback(record)
