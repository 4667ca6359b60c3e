"""
Network state containers.

Topology, Association and PowerAllocation are plain dataclasses around numpy
arrays. They validate shape and the invariants that do not depend on a
solver; everything numerical lives in channel.py.
"""

from dataclasses import dataclass
from typing import Any, Dict, List

import numpy as np

from .config import NetworkConfig
from .errors import AssignmentError, ConfigError


@dataclass
class Topology:
    """UAV 3-D positions/headings and GU 2-D positions at one time slot."""
    uav_pos: np.ndarray                  # (K, 3) m
    uav_heading: np.ndarray              # (K,) rad in [-pi, pi)
    gu_pos: np.ndarray                   # (M, 2) m

    def __post_init__(self):
        self.uav_pos = np.asarray(self.uav_pos, dtype=float).reshape(-1, 3)
        self.uav_heading = np.asarray(self.uav_heading, dtype=float).reshape(-1)
        self.gu_pos = np.asarray(self.gu_pos, dtype=float).reshape(-1, 2)
        if self.uav_heading.shape[0] != self.uav_pos.shape[0]:
            raise ConfigError("uav_heading must have one entry per UAV")

    @property
    def n_uavs(self) -> int:
        return self.uav_pos.shape[0]

    @property
    def n_gus(self) -> int:
        return self.gu_pos.shape[0]

    def copy(self) -> "Topology":
        return Topology(self.uav_pos.copy(), self.uav_heading.copy(), self.gu_pos.copy())

    def within_bounds(self, config: NetworkConfig, tol: float = 1e-9) -> bool:
        """Horizontal coordinates inside the area box, UAVs at the fixed altitude."""
        side = config.area_side
        horiz_ok = (
            np.all(self.uav_pos[:, :2] >= -tol) and np.all(self.uav_pos[:, :2] <= side + tol)
            and np.all(self.gu_pos >= -tol) and np.all(self.gu_pos <= side + tol)
        )
        alt_ok = np.allclose(self.uav_pos[:, 2], config.uav_altitude, rtol=0.0, atol=tol)
        heading_ok = np.all(self.uav_heading >= -np.pi) and np.all(self.uav_heading < np.pi)
        return bool(horiz_ok and alt_ok and heading_ok)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "uav_pos": self.uav_pos.tolist(),
            "uav_heading": self.uav_heading.tolist(),
            "gu_pos": self.gu_pos.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Topology":
        return cls(
            uav_pos=np.array(data["uav_pos"], dtype=float),
            uav_heading=np.array(data["uav_heading"], dtype=float),
            gu_pos=np.array(data["gu_pos"], dtype=float),
        )


@dataclass
class Association:
    """GU -> UAV binary assignment; assign[m] is the serving UAV of GU m."""
    assign: np.ndarray
    n_uavs: int

    def __post_init__(self):
        self.assign = np.asarray(self.assign, dtype=int).reshape(-1)
        if self.n_uavs < 1:
            raise AssignmentError("Association needs at least one UAV")
        if self.assign.size and (self.assign.min() < 0 or self.assign.max() >= self.n_uavs):
            raise AssignmentError(f"UAV index out of range in assignment {self.assign.tolist()}")

    @property
    def n_gus(self) -> int:
        return self.assign.shape[0]

    def cluster_sizes(self) -> np.ndarray:
        return np.bincount(self.assign, minlength=self.n_uavs)

    def members(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.assign == k)

    def is_balanced(self) -> bool:
        """Sizes differ by at most 1 and exactly M mod K clusters are the larger size."""
        sizes = self.cluster_sizes()
        m, k = self.n_gus, self.n_uavs
        if m < k:
            return False
        big = -(-m // k)
        n_big = int(np.sum(sizes == big))
        if m % k == 0:
            return bool(np.all(sizes == m // k))
        return bool(np.all((sizes == big) | (sizes == m // k)) and n_big == m % k)

    def indicator(self) -> np.ndarray:
        """K x M binary alpha matrix."""
        alpha = np.zeros((self.n_uavs, self.n_gus), dtype=int)
        alpha[self.assign, np.arange(self.n_gus)] = 1
        return alpha

    def to_list(self) -> List[int]:
        return self.assign.tolist()


@dataclass
class PowerAllocation:
    """Per-link transmit powers in W; nonzero only on associated links."""
    p: np.ndarray                        # (K, M)

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=float)
        if self.p.ndim != 2:
            raise ConfigError("PowerAllocation.p must be a K x M matrix")

    @classmethod
    def zeros(cls, n_uavs: int, n_gus: int) -> "PowerAllocation":
        return cls(np.zeros((n_uavs, n_gus)))

    @classmethod
    def from_links(cls, link_power: np.ndarray, association: Association) -> "PowerAllocation":
        """Scatter an M-vector of link powers (indexed by GU) onto the K x M matrix."""
        link_power = np.asarray(link_power, dtype=float).reshape(-1)
        p = np.zeros((association.n_uavs, association.n_gus))
        p[association.assign, np.arange(association.n_gus)] = link_power
        return cls(p)

    def links(self, association: Association) -> np.ndarray:
        """M-vector of the power on each GU's associated link."""
        return self.p[association.assign, np.arange(association.n_gus)].copy()

    def per_uav_total(self) -> np.ndarray:
        return self.p.sum(axis=1)

    def is_feasible(self, p_max: float, tol: float = 1e-9) -> bool:
        """Box (0 <= p <= P^max) and per-UAV budget (sum_m p <= P^max)."""
        box = np.all(self.p >= -tol) and np.all(self.p <= p_max + tol)
        budget = np.all(self.per_uav_total() <= p_max * (1.0 + tol) + tol)
        return bool(box and budget)

