"""
Per-slot power policies.

A policy is a callable (topology, association, rng) -> (PowerAllocation, ScaReport or None).
Policies that keep state between slots also expose reset(), which the env
calls at episode start.
`sca` is the proposed allocation; `random` and `uniform` are the benchmark arms.
"""

import logging
from typing import Callable, Optional, Tuple

import numpy as np

from ..core.config import POWER_POLICIES, NetworkConfig
from ..core.errors import ConfigError, DomainError
from ..core.model import Association, PowerAllocation, Topology
from .sca import ScaReport, sca

logger = logging.getLogger(__name__)

Draw = Callable[[np.random.Generator, int], np.ndarray]
PowerPolicy = Callable[[Topology, Association, np.random.Generator],
                       Tuple[PowerAllocation, Optional[ScaReport]]]


def uniform_power(association: Association, config: NetworkConfig) -> PowerAllocation:
    """P^max / |cluster| on every associated link."""
    sizes = association.cluster_sizes()
    return PowerAllocation.from_links(config.p_max / sizes[association.assign], association)


def _uniform_draw(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.uniform(0.0, 1.0, size=n)


def random_power(association: Association, config: NetworkConfig,
                 rng: np.random.Generator, draw: Optional[Draw] = None) -> PowerAllocation:
    """Uniform draws per link, rescaled so each UAV spends exactly P^max."""
    draw = draw or _uniform_draw
    p = np.zeros((association.n_uavs, association.n_gus))
    for k in range(association.n_uavs):
        members = association.members(k)
        if members.size == 0:
            continue
        w = np.asarray(draw(rng, members.size), dtype=float)
        if np.any(w < 0) or not np.sum(w) > 0:
            raise DomainError(f"Random power draw must be nonnegative with a positive sum, got {w}")
        p[k, members] = config.p_max * w / np.sum(w)
    return PowerAllocation(p)


class WarmStartSca:
    """SCA each slot, started from the previous slot's powers.

    The previous allocation is reused only while the association is the one it
    was computed for; `reset` forgets it at episode start.
    """
    __name__ = "sca_power"

    def __init__(self, config: NetworkConfig):
        self.config = config
        self._last: Optional[PowerAllocation] = None
        self._assign: Optional[np.ndarray] = None

    def reset(self) -> None:
        self._last = None
        self._assign = None

    def __call__(self, topology: Topology, association: Association,
                 rng: np.random.Generator) -> Tuple[PowerAllocation, ScaReport]:
        p0 = None
        if self._last is not None and np.array_equal(self._assign, association.assign):
            p0 = self._last
        powers, report = sca(p0, topology, association, self.config)
        self._last, self._assign = powers, association.assign.copy()
        return powers, report


def make_power_policy(name: str, config: NetworkConfig, draw: Optional[Draw] = None) -> PowerPolicy:
    if name not in POWER_POLICIES:
        raise ConfigError(f"Unknown power policy '{name}', expected one of {POWER_POLICIES}")

    if name == "sca":
        return WarmStartSca(config)
    if name == "random":
        def policy(topology, association, rng):
            return random_power(association, config, rng, draw=draw), None
    else:
        def policy(topology, association, rng):
            return uniform_power(association, config), None

    policy.__name__ = f"{name}_power"
    return policy
