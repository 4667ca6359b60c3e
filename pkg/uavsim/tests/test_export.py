import csv
import json

import pytest

from src.core.config import NetworkConfig, SimConfig
from src.core.errors import DomainError, ExportError
from src.env.scenario import initial_uav_positions
from src.env.uav_env import UavEnv
from src.harness.export import (
    LAYOUTS_FILE, MANIFEST_FILE, METRICS_FILE, REWARD_CURVE_FILE, TRACES_FILE, export, load_run,
)
from src.harness.report import PER_SLOT_FILE, SUMMARY_FILE, find_runs, report
from src.harness.runner import MetricsRecord, run_scheme
from src.harness.schemes import ExperimentSpec

NETWORK = NetworkConfig(n_gus=12, n_slots=3)


@pytest.fixture(scope="module")
def su_pp_run():
    return run_scheme(ExperimentSpec(scheme="su-pp", seeds=[0, 1], network=NETWORK))


def test_files_and_manifest(tmp_path, su_pp_run):
    paths = export(tmp_path / "run", su_pp_run.records, su_pp_run.traces, reward_curve=[0.5, 1.5],
                   config=SimConfig(network=NETWORK), seeds=[0, 1],
                   layouts=su_pp_run.layouts)
    assert {p.name for p in paths.values()} == {METRICS_FILE, TRACES_FILE, LAYOUTS_FILE, REWARD_CURVE_FILE,
                                                MANIFEST_FILE}
    manifest = json.loads(paths["manifest"].read_text())
    assert manifest["seeds"] == [0, 1]
    assert manifest["schemes"] == ["su-pp"]
    assert manifest["n_uavs"] == 3 and manifest["n_gus"] == 12
    assert manifest["config_hash"] == su_pp_run.records[0].config_hash
    assert manifest["config"]["network"]["n_gus"] == 12
    assert set(manifest["files"]) == {METRICS_FILE, TRACES_FILE, LAYOUTS_FILE, REWARD_CURVE_FILE}


def test_metrics_csv_is_long_form(tmp_path, su_pp_run):
    paths = export(tmp_path, su_pp_run.records, su_pp_run.traces)
    with open(paths["metrics"], newline="") as f:
        rows = list(csv.DictReader(f))
    assert list(rows[0]) == ["scheme", "seed", "slot", "metric", "value"]
    # mean_gu_rate, reward, dc_objective and one rate per UAV
    assert len(rows) == len(su_pp_run.records) * 6


def test_round_trip(tmp_path, su_pp_run):
    export(tmp_path, su_pp_run.records, su_pp_run.traces, reward_curve=[0.25, 1.0 / 3.0],
           layouts=su_pp_run.layouts)
    loaded = load_run(tmp_path)
    assert [r.to_dict() for r in loaded.records] == [r.to_dict() for r in su_pp_run.records]
    assert loaded.traces == su_pp_run.traces
    assert loaded.reward_curve == [0.25, 1.0 / 3.0]
    assert loaded.layouts == su_pp_run.layouts
    assert [(row["scheme"], row["seed"]) for row in loaded.layouts] == [("su-pp", 0), ("su-pp", 1)]


def test_layouts_match_the_evaluated_episode(tmp_path, su_pp_run):
    export(tmp_path, su_pp_run.records, su_pp_run.traces, layouts=su_pp_run.layouts)
    env = UavEnv(NETWORK.replace(power_policy="uniform"))
    for row in load_run(tmp_path).layouts:
        env.reset(row["seed"])
        assert row["gu_pos"] == env.topology.gu_pos.tolist()
        assert row["assign"] == env.association.to_list()
        assert row["uav_start"] == initial_uav_positions(NETWORK).tolist()
        # balanced clusters of four GUs
        assert sorted(row["assign"].count(k) for k in range(3)) == [4, 4, 4]


def test_export_is_byte_identical(tmp_path, su_pp_run):
    a = export(tmp_path / "a", su_pp_run.records, su_pp_run.traces)
    b = export(tmp_path / "b", su_pp_run.records, su_pp_run.traces)
    for key in a:
        assert a[key].read_bytes() == b[key].read_bytes()


def test_empty_traces_still_valid(tmp_path, su_pp_run):
    paths = export(tmp_path, su_pp_run.records[:1])
    assert paths["traces"].read_text() == ""
    assert paths["reward_curve"].read_text() == "episode,mean_reward\n"
    assert load_run(tmp_path).traces == []


def test_three_uavs_twenty_five_slots_give_75_trace_rows(tmp_path):
    run = run_scheme(ExperimentSpec(scheme="su-rp", seeds=[0], network=NetworkConfig(n_gus=12)))
    paths = export(tmp_path, run.records, run.traces)
    lines = paths["traces"].read_text().splitlines()
    assert len(lines) == 75
    assert set(json.loads(lines[0])) == {"scheme", "seed", "slot", "uav_id", "x", "y", "z", "v", "phi",
                                         "rate", "reward"}


def test_none_metric_written_empty(tmp_path):
    record = MetricsRecord(scheme="su-rp", seed=0, slot=1, n_uavs=1, n_gus=1, mean_gu_rate=1.0,
                           uav_rates=[1.0], reward=0.0, dc_objective=None, config_hash="h")
    export(tmp_path, [record])
    assert "su-rp,0,1,dc_objective,\n" in (tmp_path / METRICS_FILE).read_text()
    assert load_run(tmp_path).records[0].dc_objective is None


def test_changed_file_is_reported(tmp_path, su_pp_run, caplog):
    export(tmp_path, su_pp_run.records, su_pp_run.traces)
    with open(tmp_path / TRACES_FILE, "a") as f:
        f.write("\n")
    load_run(tmp_path)
    assert any("changed since export" in r.message for r in caplog.records)


def test_bad_inputs(tmp_path, su_pp_run):
    with pytest.raises(DomainError):
        export(tmp_path, [])
    other = MetricsRecord(**dict(su_pp_run.records[0].to_dict(), n_uavs=2, config_hash="x"))
    with pytest.raises(DomainError):
        export(tmp_path, [su_pp_run.records[0], other])
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(ExportError):
        export(blocker / "run", su_pp_run.records)


class TestReport:

    def test_summaries_over_nested_runs(self, tmp_path, su_pp_run):
        export(tmp_path / "runs" / "su-pp", su_pp_run.records, su_pp_run.traces)
        rp = run_scheme(ExperimentSpec(scheme="su-rp", seeds=[0, 1], network=NETWORK))
        export(tmp_path / "runs" / "nested" / "su-rp", rp.records, rp.traces)
        assert len(find_runs(tmp_path / "runs")) == 2

        summary = report(tmp_path / "runs", tmp_path / "out")
        with open(summary, newline="") as f:
            rows = list(csv.DictReader(f))
        rate_rows = [r for r in rows if r["metric"] == "mean_gu_rate"]
        assert sorted(r["scheme"] for r in rate_rows) == ["su-pp", "su-rp"]
        assert all(r["slot"] == "" and r["n_seeds"] == "2" for r in rate_rows)
        assert (tmp_path / "out" / PER_SLOT_FILE).exists()
        assert summary.name == SUMMARY_FILE

    def test_no_runs(self, tmp_path):
        with pytest.raises(ExportError):
            report(tmp_path)
