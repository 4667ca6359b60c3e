import json

import numpy as np
import pytest

from src.core.config import NetworkConfig, PpoConfig
from src.core.errors import ConfigError, ExportError, MissingCheckpointError
from src.ppo.checkpoint import (
    CHECKPOINT_FORMAT_VERSION, check_compatible, load_checkpoint, read_reward_curve, save_checkpoint,
    write_reward_curve,
)
from src.ppo.network import init_params


@pytest.fixture
def params():
    return init_params(12, 4, 2, 8, np.random.default_rng(0))


def test_round_trip(tmp_path, params):
    network = NetworkConfig(n_uavs=2, n_gus=3)
    path = save_checkpoint(tmp_path / "nested" / "policy.npz", params, PpoConfig(hidden_units=8), network,
                           extra={"seed": 4})
    loaded, meta = load_checkpoint(path)
    assert loaded.shapes() == params.shapes()
    assert np.array_equal(loaded.flatten(), params.flatten())
    assert meta["format_version"] == CHECKPOINT_FORMAT_VERSION
    assert meta["n_uavs"] == 2 and meta["n_gus"] == 3
    assert meta["seed"] == 4
    assert meta["ppo_config"]["hidden_units"] == 8


def test_missing_file(tmp_path):
    with pytest.raises(MissingCheckpointError):
        load_checkpoint(tmp_path / "nope.npz")


def test_unknown_format_version(tmp_path, params):
    path = tmp_path / "old.npz"
    with open(path, "wb") as f:
        np.savez(f, params=params.flatten(), meta=np.array(json.dumps({"format_version": 99, "layout": []})))
    with pytest.raises(ConfigError):
        load_checkpoint(path)


def test_unwritable_target(tmp_path, params):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(ExportError):
        save_checkpoint(blocker / "policy.npz", params, PpoConfig(), NetworkConfig())


def test_compatibility(tmp_path, params, caplog):
    network = NetworkConfig(n_uavs=2, n_gus=3)
    _, meta = load_checkpoint(save_checkpoint(tmp_path / "p.npz", params, PpoConfig(), network))
    check_compatible(meta, network)
    with pytest.raises(ConfigError):
        check_compatible(meta, network.replace(n_gus=4))
    check_compatible(meta, network.replace(v_max=4.0))
    assert any("hash differs" in r.message for r in caplog.records)


def test_reward_curve_round_trip(tmp_path):
    curve = [0.1, -2.0, 1.0 / 3.0]
    path = write_reward_curve(tmp_path / "curve.csv", curve)
    assert path.read_text().splitlines()[0] == "episode,mean_reward"
    assert read_reward_curve(path) == curve
    assert read_reward_curve(write_reward_curve(tmp_path / "empty.csv", [])) == []
