"""
Episode start layouts.
"""

import numpy as np

from ..core.config import NetworkConfig
from ..core.model import Topology


def initial_uav_positions(config: NetworkConfig) -> np.ndarray:
    """UAVs evenly spaced along the centre row of the area, at the fixed altitude."""
    k = np.arange(config.n_uavs)
    x = (k + 1) * config.area_side / (config.n_uavs + 1)
    y = np.full(config.n_uavs, config.area_side / 2.0)
    z = np.full(config.n_uavs, config.uav_altitude)
    return np.stack([x, y, z], axis=1)


def place_gus(config: NetworkConfig, rng: np.random.Generator) -> np.ndarray:
    """Fixed-count homogeneous PPP: i.i.d. uniform points over the square."""
    return rng.uniform(0.0, config.area_side, size=(config.n_gus, 2))


def generate_scenario(config: NetworkConfig, seed: int) -> Topology:
    """Deterministic start topology for `seed`."""
    rng = np.random.default_rng(seed)
    return Topology(
        uav_pos=initial_uav_positions(config),
        uav_heading=np.zeros(config.n_uavs),
        gu_pos=place_gus(config, rng),
    )
