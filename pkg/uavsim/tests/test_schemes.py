import pytest

from src.core.config import NetworkConfig
from src.core.errors import ConfigError
from src.harness.schemes import (
    SCHEME_POLICIES, ExperimentSpec, Scheme, needs_checkpoint, parse_scheme, power_policy, trajectory_policy,
)


@pytest.mark.parametrize("scheme,trajectory,power", [
    (Scheme.SU_RP, "static", "random"),
    (Scheme.OU_RP, "learned", "random"),
    (Scheme.SU_PP, "static", "sca"),
    (Scheme.OU_PP, "learned", "sca"),
])
def test_scheme_table(scheme, trajectory, power):
    assert trajectory_policy(scheme) == trajectory
    assert power_policy(scheme) == power
    assert needs_checkpoint(scheme) == (trajectory == "learned")


def test_mapping_is_exhaustive_and_distinct():
    assert set(SCHEME_POLICIES) == set(Scheme)
    assert len(set(SCHEME_POLICIES.values())) == len(Scheme)


@pytest.mark.parametrize("text", ["su-pp", "SU_PP", " su_pp ", Scheme.SU_PP])
def test_parse_scheme(text):
    assert parse_scheme(text) is Scheme.SU_PP


def test_unknown_scheme():
    with pytest.raises(ConfigError):
        parse_scheme("ou-xx")


class TestExperimentSpec:

    def test_defaults(self):
        spec = ExperimentSpec(scheme="su-rp")
        assert spec.seeds == list(range(20))
        assert spec.effective_network() == NetworkConfig()

    def test_slot_override(self):
        spec = ExperimentSpec(scheme="su-rp", n_slots=5)
        assert spec.effective_network().n_slots == 5
        assert spec.network.n_slots == 25

    def test_checkpoint_template(self):
        spec = ExperimentSpec(scheme="ou-pp", checkpoint="runs/k{n_uavs}_m{n_gus}/policy.npz")
        assert str(spec.checkpoint_path(NetworkConfig(n_uavs=4))) == "runs/k4_m36/policy.npz"
        assert ExperimentSpec(scheme="su-pp").checkpoint_path() is None

    def test_with_network_keeps_seeds(self):
        spec = ExperimentSpec(scheme="su-pp", seeds=[3, 1])
        other = spec.with_network(NetworkConfig(n_uavs=2))
        assert other.seeds == [3, 1]
        assert other.network.n_uavs == 2
        assert other.scheme is Scheme.SU_PP

    def test_empty_seeds(self):
        with pytest.raises(ConfigError):
            ExperimentSpec(scheme="su-pp", seeds=[])
