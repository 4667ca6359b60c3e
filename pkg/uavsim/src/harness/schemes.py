"""
Benchmark schemes and experiment specifications.

Each scheme is exactly one (trajectory policy, power policy) pair:
static UAVs or the trained PPO policy, random or SCA power.
"""

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from ..core.config import NetworkConfig, PpoConfig
from ..core.errors import ConfigError


class Scheme(str, Enum):
    SU_RP = "su-rp"
    OU_RP = "ou-rp"
    SU_PP = "su-pp"
    OU_PP = "ou-pp"


# scheme -> (trajectory policy, power policy)
SCHEME_POLICIES: Dict[Scheme, Tuple[str, str]] = {
    Scheme.SU_RP: ("static", "random"),
    Scheme.OU_RP: ("learned", "random"),
    Scheme.SU_PP: ("static", "sca"),
    Scheme.OU_PP: ("learned", "sca"),
}


def parse_scheme(value) -> Scheme:
    """Accepts 'su-rp', 'SU_RP' or a Scheme."""
    if isinstance(value, Scheme):
        return value
    key = str(value).strip().lower().replace("_", "-")
    try:
        return Scheme(key)
    except ValueError:
        raise ConfigError(f"Unknown scheme '{value}', expected one of {[s.value for s in Scheme]}")


def trajectory_policy(scheme: Scheme) -> str:
    return SCHEME_POLICIES[parse_scheme(scheme)][0]


def power_policy(scheme: Scheme) -> str:
    return SCHEME_POLICIES[parse_scheme(scheme)][1]


def needs_checkpoint(scheme: Scheme) -> bool:
    return trajectory_policy(scheme) == "learned"


@dataclass
class ExperimentSpec:
    """One scheme evaluated over a list of seeds.

    `checkpoint` may contain `{n_uavs}` / `{n_gus}` placeholders so that sweeps
    pick the policy trained for each sweep point.
    """
    scheme: Scheme
    seeds: List[int] = field(default_factory=lambda: list(range(20)))
    network: NetworkConfig = field(default_factory=NetworkConfig)
    ppo: PpoConfig = field(default_factory=PpoConfig)
    n_slots: Optional[int] = None
    episodes: Optional[int] = None
    checkpoint: Optional[str] = None
    output_dir: Optional[Path] = None

    def __post_init__(self):
        self.scheme = parse_scheme(self.scheme)
        self.seeds = [int(s) for s in self.seeds]
        if not self.seeds:
            raise ConfigError("ExperimentSpec needs at least one seed")

    def effective_network(self) -> NetworkConfig:
        if self.n_slots is not None:
            return self.network.replace(n_slots=self.n_slots)
        return self.network

    def checkpoint_path(self, network: Optional[NetworkConfig] = None) -> Optional[Path]:
        if self.checkpoint is None:
            return None
        net = network or self.effective_network()
        return Path(self.checkpoint.format(n_uavs=net.n_uavs, n_gus=net.n_gus))

    def with_network(self, network: NetworkConfig) -> "ExperimentSpec":
        return ExperimentSpec(
            scheme=self.scheme, seeds=list(self.seeds), network=network, ppo=self.ppo,
            n_slots=self.n_slots, episodes=self.episodes, checkpoint=self.checkpoint,
            output_dir=self.output_dir,
        )
