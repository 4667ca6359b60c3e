"""
Versioned policy checkpoints and reward-curve files.

A checkpoint is an .npz archive with the flat parameter vector and a JSON
metadata string (format version, layout, config hashes).
"""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.config import NetworkConfig, PpoConfig, network_fingerprint
from ..core.fingerprint import compute_config_fingerprint
from ..core.errors import ConfigError, ExportError, MissingCheckpointError
from .network import PolicyParams

logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT_VERSION = 1
REWARD_CURVE_HEADER = ("episode", "mean_reward")


def save_checkpoint(path: Union[str, Path], params: PolicyParams, ppo_config: PpoConfig,
                    network_config: NetworkConfig, extra: Optional[Dict[str, Any]] = None) -> Path:
    path = Path(path)
    meta = {
        "format_version": CHECKPOINT_FORMAT_VERSION,
        "layout": [[name, list(shape)] for name, shape in params.shapes().items()],
        "ppo_config": ppo_config.to_dict(),
        "ppo_hash": compute_config_fingerprint({"ppo": ppo_config.to_dict()}),
        "network_hash": network_fingerprint(network_config),
        "n_uavs": network_config.n_uavs,
        "n_gus": network_config.n_gus,
    }
    meta.update(extra or {})
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "wb") as f:
            np.savez(f, params=params.flatten(), meta=np.array(json.dumps(meta, sort_keys=True)))
    except OSError as e:
        raise ExportError(f"Cannot write checkpoint {path}: {e}")
    logger.info(f"Saved checkpoint {path}")
    return path


def load_checkpoint(path: Union[str, Path]) -> Tuple[PolicyParams, Dict[str, Any]]:
    path = Path(path)
    if not path.exists():
        raise MissingCheckpointError(f"Checkpoint not found: {path}")
    with np.load(path, allow_pickle=False) as data:
        vector = data["params"]
        meta = json.loads(str(data["meta"]))
    if meta.get("format_version") != CHECKPOINT_FORMAT_VERSION:
        raise ConfigError(f"Unsupported checkpoint format {meta.get('format_version')} in {path}")
    template = PolicyParams({name: np.zeros(shape) for name, shape in meta["layout"]})
    return template.unflatten(vector), meta


def check_compatible(meta: Dict[str, Any], network_config: NetworkConfig) -> None:
    """A policy only fits the (K, M) it was trained on."""
    if meta.get("n_uavs") != network_config.n_uavs or meta.get("n_gus") != network_config.n_gus:
        raise ConfigError(
            f"Checkpoint trained for K={meta.get('n_uavs')}, M={meta.get('n_gus')}; "
            f"config has K={network_config.n_uavs}, M={network_config.n_gus}"
        )
    if meta.get("network_hash") != network_fingerprint(network_config):
        logger.warning("Checkpoint network hash differs from the evaluation config")


def write_reward_curve(path: Union[str, Path], curve: Sequence[float]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(REWARD_CURVE_HEADER)
            for episode, value in enumerate(curve):
                writer.writerow([episode, repr(float(value))])
    except OSError as e:
        raise ExportError(f"Cannot write reward curve {path}: {e}")
    return path


def read_reward_curve(path: Union[str, Path]) -> List[float]:
    with open(path, "r", newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        return [float(row["mean_reward"]) for row in reader]
