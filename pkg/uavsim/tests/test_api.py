"""API tests for the scheme evaluation endpoints."""

import numpy as np
from fastapi.testclient import TestClient

from src.api import app, classify_status
from src.core.config import NetworkConfig, PpoConfig
from src.core.errors import AssignmentError, ConfigError, DomainError, ExportError, MissingCheckpointError
from src.env.uav_env import UavEnv
from src.ppo.checkpoint import save_checkpoint
from src.ppo.network import init_params

client = TestClient(app)

SMALL = {"n_uavs": 2, "n_gus": 6}


def test_classify_status():
    assert classify_status(None) == 200
    assert classify_status(ConfigError("x")) == 400
    assert classify_status(DomainError("x")) == 400
    assert classify_status(AssignmentError("x")) == 400
    assert classify_status(MissingCheckpointError("x")) == 422
    assert classify_status(ExportError("x")) == 500
    assert classify_status(RuntimeError("x")) == 500


def test_list_schemes():
    r = client.get("/v1/schemes")
    assert r.status_code == 200
    schemes = {s["name"]: s for s in r.json()["schemes"]}
    assert set(schemes) == {"su-rp", "ou-rp", "su-pp", "ou-pp"}
    assert schemes["ou-pp"] == {"name": "ou-pp", "trajectory": "learned", "power": "sca"}


def test_evaluate_static_scheme():
    r = client.post("/v1/runs/evaluate", json={
        "scheme": "su-pp", "seeds": [0, 1], "network": SMALL, "n_slots": 2, "include_traces": True,
    })
    assert r.status_code == 200
    data = r.json()
    assert data["scheme"] == "su-pp"
    assert len(data["records"]) == 4
    assert len(data["traces"]) == 8
    assert {row["metric"] for row in data["summary"]} >= {"mean_gu_rate", "reward", "uav_rate_1"}


def test_evaluate_without_traces():
    r = client.post("/v1/runs/evaluate", json={"scheme": "su-rp", "network": SMALL, "n_slots": 1})
    assert r.status_code == 200
    assert "traces" not in r.json()
    assert r.json()["seeds"] == [0]


def test_evaluate_with_layouts():
    r = client.post("/v1/runs/evaluate", json={"scheme": "su-rp", "network": SMALL, "n_slots": 1,
                                                "seeds": [0, 1], "include_layouts": True})
    assert r.status_code == 200
    layouts = r.json()["layouts"]
    assert [row["seed"] for row in layouts] == [0, 1]
    assert all(row["scheme"] == "su-rp" for row in layouts)
    assert len(layouts[0]["gu_pos"]) == len(layouts[0]["assign"]) == SMALL["n_gus"]


def test_evaluate_learned_scheme(tmp_path):
    network = NetworkConfig(**SMALL)
    env = UavEnv(network)
    params = init_params(env.observation_size, env.action_size, 1, 8, np.random.default_rng(0))
    path = save_checkpoint(tmp_path / "policy.npz", params, PpoConfig(hidden_layers=1, hidden_units=8), network)
    r = client.post("/v1/runs/evaluate", json={
        "scheme": "ou-rp", "network": SMALL, "n_slots": 2, "checkpoint": str(path),
    })
    assert r.status_code == 200
    assert len(r.json()["records"]) == 2


def test_missing_checkpoint_is_422():
    r = client.post("/v1/runs/evaluate", json={"scheme": "ou-pp", "network": SMALL})
    assert r.status_code == 422
    assert r.json()["error"] == "MissingCheckpointError"


def test_bad_requests_are_400():
    assert client.post("/v1/runs/evaluate", json={"seeds": [0]}).status_code == 400
    assert client.post("/v1/runs/evaluate", json={"scheme": "zz"}).status_code == 400
    r = client.post("/v1/runs/evaluate", json={"scheme": "su-pp", "network": {"n_uav": 2}})
    assert r.status_code == 400
    assert r.json()["error"] == "ConfigError"
