"""
Simulation configuration.

NetworkConfig holds every physical, protocol and environment constant;
PpoConfig holds the learning hyperparameters. Both load from a YAML document
with two top-level mappings (`network:` and `ppo:`) that is validated against
schemas/config.schema.json before any field is read.
"""

import json
import logging
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional, Union

import jsonschema
import yaml

from .fingerprint import compute_config_fingerprint
from .errors import ConfigError

logger = logging.getLogger(__name__)

INTERFERENCE_MODES = ("literal", "physical")
POWER_POLICIES = ("sca", "random", "uniform")
OPTIMIZERS = ("sgd", "adam")


def _schema_path() -> Path:
    base_dir = Path(__file__).resolve().parents[2]
    return base_dir / "schemas" / "config.schema.json"


@dataclass(frozen=True)
class NetworkConfig:
    """Physical, protocol and environment constants."""
    bandwidth_total: float = 1e11          # Hz
    carrier_absorption: float = 0.005      # 1/m
    ref_gain_db: float = -40.0             # dB
    noise_psd_dbm_hz: float = -174.0       # dBm/Hz
    p_max: float = 2.0                     # W
    r_min: float = 2e10                    # bit/s
    area_side: float = 200.0               # m
    uav_altitude: float = 20.0             # m
    v_max: float = 5.0                     # m/s
    d_min: float = 10.0                    # m
    slot_duration: float = 1.0             # s
    n_slots: int = 25
    n_uavs: int = 3
    n_gus: int = 36
    interference_mode: str = "literal"
    carrier_frequency_hz: float = 1.2e12
    reward_scale: float = 1e-12
    terminate_on_violation: bool = True
    power_policy: str = "sca"
    sca_tol: float = 1e-3
    sca_max_outer: int = 50
    bkmc_max_iters: int = 100

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        positive = (
            "bandwidth_total", "p_max", "r_min", "area_side", "uav_altitude",
            "v_max", "d_min", "slot_duration", "carrier_frequency_hz",
            "reward_scale", "sca_tol",
        )
        for name in positive:
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be strictly positive, got {getattr(self, name)}")
        if self.carrier_absorption < 0:
            raise ConfigError(f"carrier_absorption must be >= 0, got {self.carrier_absorption}")
        if self.d_min >= self.area_side:
            raise ConfigError(f"d_min ({self.d_min}) must be smaller than area_side ({self.area_side})")
        for name in ("n_slots", "n_uavs", "sca_max_outer", "bkmc_max_iters"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.n_gus < self.n_uavs:
            raise ConfigError(f"n_gus ({self.n_gus}) must be >= n_uavs ({self.n_uavs})")
        if self.interference_mode not in INTERFERENCE_MODES:
            raise ConfigError(f"interference_mode must be one of {INTERFERENCE_MODES}")
        if self.power_policy not in POWER_POLICIES:
            raise ConfigError(f"power_policy must be one of {POWER_POLICIES}")

    @property
    def ref_gain_linear(self) -> float:
        return db_to_linear(self.ref_gain_db)

    @property
    def noise_psd_w_hz(self) -> float:
        return dbm_to_watt(self.noise_psd_dbm_hz)

    def replace(self, **overrides: Any) -> "NetworkConfig":
        return replace(self, **overrides)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "NetworkConfig":
        return cls(**_known_fields(cls, data))


@dataclass(frozen=True)
class PpoConfig:
    """PPO hyperparameters; episodes is scaled down from the full training run."""
    clip_epsilon: float = 0.2
    discount: float = 0.99
    gae_lambda: float = 0.95
    learning_rate: float = 3e-4
    minibatch_size: int = 120
    epochs: int = 3
    episodes: int = 2000
    actors: int = 4
    value_coef: float = 0.5
    entropy_coef: float = 0.01
    hidden_layers: int = 2
    hidden_units: int = 128
    optimizer: str = "sgd"
    max_grad_norm: Optional[float] = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not 0.0 < self.clip_epsilon < 1.0:
            raise ConfigError("clip_epsilon must lie in (0, 1)")
        if not 0.0 < self.discount <= 1.0:
            raise ConfigError("discount must lie in (0, 1]")
        if not 0.0 <= self.gae_lambda <= 1.0:
            raise ConfigError("gae_lambda must lie in [0, 1]")
        if not self.learning_rate > 0:
            raise ConfigError("learning_rate must be positive")
        for name in ("minibatch_size", "epochs", "actors", "hidden_layers", "hidden_units"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.episodes < 0:
            raise ConfigError("episodes must be >= 0")
        if self.value_coef < 0 or self.entropy_coef < 0:
            raise ConfigError("value_coef and entropy_coef must be >= 0")
        if self.optimizer not in OPTIMIZERS:
            raise ConfigError(f"optimizer must be one of {OPTIMIZERS}")
        if self.max_grad_norm is not None and not self.max_grad_norm > 0:
            raise ConfigError("max_grad_norm must be positive when set")

    def replace(self, **overrides: Any) -> "PpoConfig":
        return replace(self, **overrides)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PpoConfig":
        return cls(**_known_fields(cls, data))


@dataclass(frozen=True)
class SimConfig:
    """A complete configuration document."""
    network: NetworkConfig = field(default_factory=NetworkConfig)
    ppo: PpoConfig = field(default_factory=PpoConfig)

    def to_dict(self) -> Dict[str, Any]:
        return {"network": self.network.to_dict(), "ppo": self.ppo.to_dict()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SimConfig":
        validate_document(data)
        try:
            return cls(
                network=NetworkConfig.from_dict(data.get("network") or {}),
                ppo=PpoConfig.from_dict(data.get("ppo") or {}),
            )
        except TypeError as e:
            raise ConfigError(str(e))

    def fingerprint(self) -> str:
        return compute_config_fingerprint(self.to_dict())


def db_to_linear(value_db: float) -> float:
    """10^(x/10)."""
    return 10.0 ** (value_db / 10.0)


def dbm_to_watt(value_dbm: float) -> float:
    """dBm (or dBm/Hz) to W (or W/Hz): 10^((x-30)/10)."""
    return 10.0 ** ((value_dbm - 30.0) / 10.0)


def network_fingerprint(network: NetworkConfig) -> str:
    return compute_config_fingerprint({"network": network.to_dict()})


def _known_fields(cls, data: Dict[str, Any]) -> Dict[str, Any]:
    names = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"Unknown {cls.__name__} keys: {', '.join(unknown)}")
    return dict(data)


_SCHEMA_CACHE: Dict[str, Any] = {}


def load_schema() -> Dict[str, Any]:
    if "config" not in _SCHEMA_CACHE:
        with open(_schema_path(), "r", encoding="utf-8") as f:
            _SCHEMA_CACHE["config"] = json.load(f)
    return _SCHEMA_CACHE["config"]


def validate_document(data: Any) -> None:
    """Validate a raw config document against the JSON schema."""
    if not isinstance(data, dict):
        raise ConfigError("Config document must be a mapping with 'network' and/or 'ppo' sections")
    try:
        jsonschema.validate(data, load_schema())
    except jsonschema.ValidationError as e:
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigError(f"Invalid config at {where}: {e.message}")


def load_config(path: Optional[Union[str, Path]] = None) -> SimConfig:
    """Load a YAML config file. None returns the defaults."""
    if path is None:
        return SimConfig()
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Config file not found: {path}")
    with open(path, "r", encoding="utf-8-sig") as f:
        try:
            data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"Config file {path} is not valid YAML: {e}")
    config = SimConfig.from_dict(data)
    logger.info(f"Loaded config {path} ({config.fingerprint()[:12]})")
    return config


def dump_config(config: SimConfig, path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(config.to_dict(), f, sort_keys=True)
